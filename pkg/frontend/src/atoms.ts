// Minimal reader for the service's atom wire form: "pred" or
// "pred(arg, arg)" with possibly parenthesized nesting never deeper than
// the argument level.

export interface ParsedAtom {
  predicate: string;
  args: string[];
}

export function parseAtom(text: string): ParsedAtom | null {
  const trimmed = text.trim();
  const open = trimmed.indexOf("(");
  if (open < 0) {
    return /^-?[a-z][a-z0-9_]*$/.test(trimmed)
      ? { predicate: trimmed, args: [] }
      : null;
  }
  if (!trimmed.endsWith(")")) return null;
  const predicate = trimmed.slice(0, open);
  const inner = trimmed.slice(open + 1, -1);
  const args: string[] = [];
  let depth = 0;
  let current = "";
  for (const ch of inner) {
    if (ch === "(") depth += 1;
    if (ch === ")") depth -= 1;
    if (ch === "," && depth === 0) {
      args.push(current.trim());
      current = "";
    } else {
      current += ch;
    }
  }
  if (current.trim() !== "") args.push(current.trim());
  return { predicate, args };
}

export function prettyAtom(text: string): string {
  const parsed = parseAtom(text);
  if (!parsed) return text;
  const words = (s: string) => s.replace(/_/g, " ");
  if (parsed.args.length === 0) return words(parsed.predicate);
  return `${words(parsed.predicate)} of ${parsed.args.map(words).join(", ")}`;
}
