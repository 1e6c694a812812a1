// Pure HTML-string renderers. Everything shown comes from the served
// report JSON; the SVG arrives server-rendered and is embedded verbatim.

import { GrantSummary, Report, ReportItem } from "./schema.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function utc(seconds: number): string {
  return new Date(seconds * 1000).toISOString().replace(".000Z", "Z");
}

export function renderGrantSummary(summary: GrantSummary): string {
  const types = summary.activity_types.map(escapeHtml).join(", ");
  return [
    `<dl class="grant-summary">`,
    `<dt>Identity</dt><dd><code>${summary.pk}</code></dd>`,
    `<dt>Window</dt><dd>${utc(summary.from)} &rarr; ${utc(summary.to)}</dd>`,
    `<dt>Activity types</dt><dd>${types}</dd>`,
    `<dt>Keys disclosed</dt><dd>${summary.key_count}</dd>`,
    `</dl>`,
  ].join("");
}

export function renderError(message: string): string {
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}

function statusCell(value: string): string {
  const ok = value === "SignatureOk" || value === "AnchorOk" || value === "DecryptOk";
  return `<td class="${ok ? "ok" : "bad"}">${value}</td>`;
}

function itemRow(item: ReportItem): string {
  const failed =
    item.signature !== "SignatureOk" ||
    item.anchor !== "AnchorOk" ||
    item.decrypt !== "DecryptOk";
  const outlier = item.outlier === true ? "&#9888;" : "";
  return [
    `<tr class="${failed ? "failed" : "passed"}">`,
    `<td><code>${item.id.slice(0, 16)}&hellip;</code></td>`,
    `<td>${utc(item.time)}</td>`,
    `<td>${escapeHtml(item.type)}</td>`,
    statusCell(item.signature),
    statusCell(item.anchor),
    statusCell(item.decrypt),
    `<td>${outlier}</td>`,
    `</tr>`,
  ].join("");
}

export function failureCauses(report: Report): string[] {
  const causes: string[] = [];
  for (const item of report.items) {
    if (item.signature !== "SignatureOk") {
      causes.push(`record ${item.id.slice(0, 16)}…: ${item.signature}`);
    }
    if (item.anchor !== "AnchorOk") {
      causes.push(`record ${item.id.slice(0, 16)}…: ${item.anchor}`);
    }
    if (item.decrypt !== "DecryptOk") {
      causes.push(`record ${item.id.slice(0, 16)}…: ${item.decrypt}`);
    }
  }
  if (report.items.length === 0) {
    causes.push("no evidence records in the granted window");
  }
  return causes;
}

export function renderReport(report: Report): string {
  const verified = report.verdict === "Verified";
  const parts: string[] = [];
  parts.push(
    `<div class="verdict ${verified ? "verified" : "rejected"}">` +
      `${report.verdict}</div>`,
  );
  if (!verified) {
    const causes = failureCauses(report)
      .map((cause) => `<li>${escapeHtml(cause)}</li>`)
      .join("");
    parts.push(`<div class="banner error"><strong>Rejected because:</strong>` +
      `<ul>${causes}</ul></div>`);
  }
  parts.push(
    `<p class="meta">${report.items.length} records, window ` +
      `${utc(report.window.from)} &rarr; ${utc(report.window.to)}, ` +
      `${report.outlier_count} anomalous windows</p>`,
  );
  if (verified && report.svg.pie && report.svg.slash) {
    parts.push(
      `<div class="gists">` +
        `<figure><figcaption>Activity rings</figcaption>${report.svg.pie}</figure>` +
        `<figure><figcaption>Daily pattern</figcaption>${report.svg.slash}</figure>` +
        `</div>`,
    );
  }
  parts.push(
    `<table class="items"><thead><tr>` +
      `<th>id</th><th>time</th><th>type</th>` +
      `<th>signature</th><th>anchor</th><th>decrypt</th><th></th>` +
      `</tr></thead><tbody>${report.items.map(itemRow).join("")}</tbody></table>`,
  );
  return parts.join("\n");
}

export function renderDecisionConfirmation(decision: string, seq: number): string {
  return (
    `<div class="banner ok">Decision <strong>${escapeHtml(decision)}</strong>` +
    ` recorded (entry #${seq}).</div>`
  );
}
