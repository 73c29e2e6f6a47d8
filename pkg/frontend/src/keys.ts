/** Keyboard-only operation: a/y agree, r/n reject, s/space skip. */

export type QueueAction = "agree" | "reject" | "skip";

const BINDINGS: Record<string, QueueAction> = {
  a: "agree",
  y: "agree",
  r: "reject",
  n: "reject",
  s: "skip",
  " ": "skip",
};

export function actionForKey(key: string): QueueAction | null {
  return BINDINGS[key.toLowerCase()] ?? null;
}
