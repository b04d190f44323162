// Helpers for displaying numbers exactly as the API serialized them.
//
// Re-stringifying a parsed float can change its text (1.0 -> "1"), so the
// console pulls the literal digits straight out of the raw response body
// and renders those. Every displayed number is a verbatim API token.

const NUMBER = String.raw`-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?`;

/** Literals of `"key": <number>` occurrences, in document order. */
export function numberLiterals(raw: string, key: string): string[] {
  const pattern = new RegExp(`"${key}"\\s*:\\s*(${NUMBER}|null)`, "g");
  const out: string[] = [];
  for (const match of raw.matchAll(pattern)) {
    out.push(match[1] as string);
  }
  return out;
}

/** First `"key": <number>` literal, or null when absent/null. */
export function numberLiteral(raw: string, key: string): string | null {
  const found = numberLiterals(raw, key);
  if (found.length === 0 || found[0] === "null") {
    return null;
  }
  return found[0] as string;
}

/** Raw value literals of a flat string-keyed object like "groups". */
export function objectLiterals(raw: string, key: string): Map<string, string> {
  const out = new Map<string, string>();
  const start = raw.indexOf(`"${key}"`);
  if (start < 0) return out;
  const open = raw.indexOf("{", start);
  if (open < 0) return out;
  let depth = 0;
  let end = open;
  for (; end < raw.length; end++) {
    const ch = raw[end];
    if (ch === "{") depth++;
    else if (ch === "}" && --depth === 0) break;
  }
  const body = raw.slice(open + 1, end);
  const pair = new RegExp(String.raw`"((?:[^"\\]|\\.)*)"\s*:\s*(${NUMBER}|null)`, "g");
  for (const match of body.matchAll(pair)) {
    out.set(match[1] as string, match[2] as string);
  }
  return out;
}
