/**
 * Wire protocol: UTF-8 newline-delimited JSON, one response per request.
 *
 * Requests:  {"op":"ping"} | {"op":"info"} | {"op":"embed","texts":[str]}
 *            | {"op":"logprob","prefix":[str],"candidates":[str]}
 *            | {"op":"rcr","sentence":str}
 * Responses: {"ok":true} | {"vectors":[[num]]} | {"logps":[num]}
 *            | {"text":str} | info object | {"error":str}
 */

export const PROTOCOL_VERSION = 1;

export interface Handlers {
  embed?: (texts: string[]) => number[][];
  logprob?: (prefix: string[], candidates: string[]) => number[];
  rcr?: (sentence: string) => string;
  info: () => Record<string, unknown>;
}

function isStringArray(x: unknown): x is string[] {
  return Array.isArray(x) && x.every((e) => typeof e === "string");
}

/** Never throws; every input line maps to exactly one response line. */
export function handleLine(line: string, handlers: Handlers): string {
  try {
    return JSON.stringify(dispatch(line, handlers));
  } catch {
    return JSON.stringify({ error: "internal" });
  }
}

function dispatch(line: string, handlers: Handlers): Record<string, unknown> {
  let req: unknown;
  try {
    req = JSON.parse(line);
  } catch {
    return { error: "bad_request" };
  }
  if (typeof req !== "object" || req === null || Array.isArray(req)) {
    return { error: "bad_request" };
  }
  const obj = req as Record<string, unknown>;
  switch (obj.op) {
    case "ping":
      return { ok: true };
    case "info":
      return { ok: true, protocol: PROTOCOL_VERSION, ...handlers.info() };
    case "embed": {
      if (!isStringArray(obj.texts)) return { error: "bad_request" };
      if (!handlers.embed) return { error: "unavailable" };
      return { vectors: handlers.embed(obj.texts) };
    }
    case "logprob": {
      if (!isStringArray(obj.prefix) || !isStringArray(obj.candidates)) {
        return { error: "bad_request" };
      }
      if (!handlers.logprob) return { error: "unavailable" };
      return { logps: handlers.logprob(obj.prefix, obj.candidates) };
    }
    case "rcr": {
      if (typeof obj.sentence !== "string") return { error: "bad_request" };
      if (!handlers.rcr) return { error: "unavailable" };
      return { text: handlers.rcr(obj.sentence) };
    }
    default:
      return { error: "unknown_op" };
  }
}
