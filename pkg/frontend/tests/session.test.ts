import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { VerifierApi } from "../src/api.js";
import { SchemaError } from "../src/schema.js";
import { ConsoleSession } from "../src/session.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

/** VerifierApi replacement that serves fixtures and counts decision posts. */
class FakeApi extends VerifierApi {
  decisionPosts = 0;

  constructor(private reportJson: string) {
    super("");
  }

  override async verify(_grant: unknown) {
    const { parseReport } = await import("../src/schema.js");
    return { report: parseReport(this.reportJson), rawJson: this.reportJson };
  }

  override async submitDecision(_id: string, decision: string, note: string) {
    this.decisionPosts += 1;
    return { decision, note, recorded_at: 1, seq: this.decisionPosts - 1 };
  }
}

describe("console session", () => {
  it("decision buttons stay disabled until a report exists", async () => {
    const api = new FakeApi(fixture("api_report_happy.json"));
    const session = new ConsoleSession(api);
    expect(session.canDecide).toBe(false);
    session.loadGrant(fixture("grant_happy.json"));
    expect(session.canDecide).toBe(false);
    await session.runVerification();
    expect(session.canDecide).toBe(true);
  });

  it("a malformed grant changes nothing", () => {
    const api = new FakeApi(fixture("api_report_happy.json"));
    const session = new ConsoleSession(api);
    expect(() => session.loadGrant("{not json")).toThrow(SchemaError);
    expect(session.grant).toBeNull();
    expect(session.canVerify).toBe(false);
  });

  it("keeps the exact served JSON for display", async () => {
    const raw = fixture("api_report_happy.json");
    const session = new ConsoleSession(new FakeApi(raw));
    session.loadGrant(fixture("grant_happy.json"));
    await session.runVerification();
    expect(session.reportRawJson).toBe(raw);
  });

  it("double submission records exactly one entry per confirmation", async () => {
    const api = new FakeApi(fixture("api_report_happy.json"));
    const session = new ConsoleSession(api);
    session.loadGrant(fixture("grant_happy.json"));
    await session.runVerification();

    const first = await session.submitDecision("trust", "ok");
    expect(first).not.toBeNull();
    // a second click without explicit re-arm is suppressed
    const second = await session.submitDecision("trust", "ok");
    expect(second).toBeNull();
    expect(api.decisionPosts).toBe(1);

    // deliberate re-decision is allowed and counted separately
    session.allowAnotherDecision();
    const third = await session.submitDecision("distrust", "changed");
    expect(third).not.toBeNull();
    expect(api.decisionPosts).toBe(2);
  });

  it("verification failure leaves the decision controls locked", async () => {
    const api = new FakeApi(fixture("api_report_happy.json"));
    api.verify = async () => {
      throw new Error("backend down");
    };
    const session = new ConsoleSession(api);
    session.loadGrant(fixture("grant_happy.json"));
    await expect(session.runVerification()).rejects.toThrow("backend down");
    expect(session.canDecide).toBe(false);
  });
});
