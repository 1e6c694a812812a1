// Wire types for the verifier API, with strict parsing. A malformed file
// or response throws SchemaError and is never partially applied.

export class SchemaError extends Error {}

export interface GrantKey {
  day_index: number;
  activity_type: string;
  ek: string;
}

export interface Grant {
  pk: string;
  from: number;
  to: number;
  activity_types: string[];
  keys: GrantKey[];
}

export interface GrantSummary {
  pk: string;
  from: number;
  to: number;
  activity_types: string[];
  key_count: number;
}

export type SignatureStatus = "SignatureOk" | "SignatureFail";
export type AnchorStatus = "AnchorOk" | "AnchorMismatch" | "AnchorMissing";
export type DecryptStatus = "DecryptOk" | "WrongKey";

export interface ReportItem {
  id: string;
  time: number;
  type: string;
  signature: SignatureStatus;
  anchor: AnchorStatus;
  decrypt: DecryptStatus;
  distance: number | null;
  outlier: boolean | null;
}

export interface Decision {
  decision: string;
  note: string;
  recorded_at: number;
  seq: number;
}

export interface Report {
  report_id: string;
  pk: string;
  window: { from: number; to: number };
  activity_types: string[];
  items: ReportItem[];
  verdict: "Verified" | "Rejected";
  steps: string[];
  model: unknown;
  svg: { pie: string | null; slash: string | null };
  window_size: number;
  outlier_count: number;
  decision: Decision | null;
}

const HEX_RE = /^[0-9a-f]*$/;

function fail(message: string): never {
  throw new SchemaError(message);
}

function asObject(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(`${what} must be an object`);
  }
  return value as Record<string, unknown>;
}

function asHex(value: unknown, what: string, bytes?: number): string {
  if (typeof value !== "string" || !HEX_RE.test(value)) fail(`${what} must be lowercase hex`);
  if (bytes !== undefined && value.length !== 2 * bytes) {
    fail(`${what} must be ${bytes} bytes of hex`);
  }
  return value;
}

function asInt(value: unknown, what: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) fail(`${what} must be a number`);
  return value;
}

function asStringArray(value: unknown, what: string): string[] {
  if (!Array.isArray(value) || !value.every((v) => typeof v === "string")) {
    fail(`${what} must be an array of strings`);
  }
  return value as string[];
}

export function parseGrant(text: string): Grant {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    fail("grant file is not valid JSON");
  }
  const obj = asObject(raw, "grant");
  const keysRaw = obj.keys;
  if (!Array.isArray(keysRaw)) fail("grant.keys must be an array");
  const keys = keysRaw.map((entry, i) => {
    const key = asObject(entry, `grant.keys[${i}]`);
    return {
      day_index: asInt(key.day_index, `grant.keys[${i}].day_index`),
      activity_type: String(key.activity_type ?? fail(`grant.keys[${i}].activity_type missing`)),
      ek: asHex(key.ek, `grant.keys[${i}].ek`, 32),
    };
  });
  return {
    pk: asHex(obj.pk, "grant.pk", 32),
    from: asInt(obj.from, "grant.from"),
    to: asInt(obj.to, "grant.to"),
    activity_types: asStringArray(obj.activity_types, "grant.activity_types"),
    keys,
  };
}

export function summarizeGrant(grant: Grant): GrantSummary {
  return {
    pk: grant.pk,
    from: grant.from,
    to: grant.to,
    activity_types: [...grant.activity_types],
    key_count: grant.keys.length,
  };
}

const SIGNATURE_VALUES = new Set(["SignatureOk", "SignatureFail"]);
const ANCHOR_VALUES = new Set(["AnchorOk", "AnchorMismatch", "AnchorMissing"]);
const DECRYPT_VALUES = new Set(["DecryptOk", "WrongKey"]);

export function parseReport(text: string): Report {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    fail("report is not valid JSON");
  }
  const obj = asObject(raw, "report");
  if (obj.verdict !== "Verified" && obj.verdict !== "Rejected") {
    fail("report.verdict must be Verified or Rejected");
  }
  const windowObj = asObject(obj.window, "report.window");
  const itemsRaw = obj.items;
  if (!Array.isArray(itemsRaw)) fail("report.items must be an array");
  const items = itemsRaw.map((entry, i) => {
    const item = asObject(entry, `report.items[${i}]`);
    if (!SIGNATURE_VALUES.has(String(item.signature))) fail(`items[${i}].signature invalid`);
    if (!ANCHOR_VALUES.has(String(item.anchor))) fail(`items[${i}].anchor invalid`);
    if (!DECRYPT_VALUES.has(String(item.decrypt))) fail(`items[${i}].decrypt invalid`);
    return {
      id: asHex(item.id, `items[${i}].id`, 32),
      time: asInt(item.time, `items[${i}].time`),
      type: String(item.type),
      signature: item.signature as SignatureStatus,
      anchor: item.anchor as AnchorStatus,
      decrypt: item.decrypt as DecryptStatus,
      distance: item.distance === null ? null : asInt(item.distance, `items[${i}].distance`),
      outlier: item.outlier === null ? null : Boolean(item.outlier),
    };
  });
  const svg = asObject(obj.svg ?? { pie: null, slash: null }, "report.svg");
  return {
    report_id: String(obj.report_id ?? fail("report.report_id missing")),
    pk: asHex(obj.pk, "report.pk", 32),
    window: { from: asInt(windowObj.from, "window.from"), to: asInt(windowObj.to, "window.to") },
    activity_types: asStringArray(obj.activity_types, "report.activity_types"),
    items,
    verdict: obj.verdict,
    steps: asStringArray(obj.steps ?? [], "report.steps"),
    model: obj.model ?? null,
    svg: {
      pie: svg.pie === null || svg.pie === undefined ? null : String(svg.pie),
      slash: svg.slash === null || svg.slash === undefined ? null : String(svg.slash),
    },
    window_size: asInt(obj.window_size ?? 0, "report.window_size"),
    outlier_count: asInt(obj.outlier_count ?? 0, "report.outlier_count"),
    decision: obj.decision ? (obj.decision as Decision) : null,
  };
}

// Canonical JSON (sorted keys, no spacing) for byte-level comparisons.
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`);
  return `{${entries.join(",")}}`;
}
