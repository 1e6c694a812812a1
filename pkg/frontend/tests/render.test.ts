import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  failureCauses,
  renderGrantSummary,
  renderReport,
} from "../src/render.js";
import { parseGrant, parseReport, summarizeGrant } from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");

function report(name: string) {
  return parseReport(readFileSync(join(FIXTURES, `api_report_${name}.json`), "utf-8"));
}

describe("grant summary view", () => {
  it("shows window, types and key count", () => {
    const grant = parseGrant(
      readFileSync(join(FIXTURES, "grant_happy.json"), "utf-8"));
    const html = renderGrantSummary(summarizeGrant(grant));
    expect(html).toContain("Keys disclosed");
    expect(html).toContain(`<dd>${grant.keys.length}</dd>`);
    expect(html).toContain("twitter.text");
  });
});

describe("report view", () => {
  it("happy path shows the Verified badge and both gists", () => {
    const html = renderReport(report("happy"));
    expect(html).toContain(`class="verdict verified"`);
    expect(html).toContain("Verified");
    // server-rendered SVG is embedded verbatim
    const pie = report("happy").svg.pie!;
    expect(html).toContain(pie);
    expect((html.match(/<svg /g) ?? []).length).toBe(2);
  });

  it("tampered fixture is Rejected with the AnchorMismatch row highlighted", () => {
    const r = report("tamper");
    expect(r.verdict).toBe("Rejected");
    const html = renderReport(r);
    expect(html).toContain(`class="verdict rejected"`);
    expect(html).toContain("AnchorMismatch");
    expect(html).toContain("Rejected because:");
    const failedRows = (html.match(/<tr class="failed">/g) ?? []).length;
    expect(failedRows).toBe(1);
    expect(failureCauses(r).join(" ")).toContain("AnchorMismatch");
  });

  it("wrong-key fixture is Rejected with WrongKey rows", () => {
    const r = report("wrongkey");
    expect(r.verdict).toBe("Rejected");
    const html = renderReport(r);
    expect(html).toContain("WrongKey");
    const wrongKeyItems = r.items.filter((i) => i.decrypt === "WrongKey");
    expect(wrongKeyItems.length).toBeGreaterThan(0);
    const failedRows = (html.match(/<tr class="failed">/g) ?? []).length;
    expect(failedRows).toBe(wrongKeyItems.length);
  });

  it("rejected reports do not embed the gists", () => {
    const html = renderReport(report("tamper"));
    expect(html).not.toContain("<svg ");
  });

  it("escapes untrusted strings", () => {
    const r = report("happy");
    r.items[0].type = `<script>alert(1)</script>`;
    const html = renderReport(r);
    expect(html).not.toContain("<script>alert(1)</script>");
    expect(html).toContain("&lt;script&gt;");
  });
});
