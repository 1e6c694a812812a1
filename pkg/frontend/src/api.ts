// Fetch wrappers for the verifier API. The grant is the only key material
// the console ever holds, and POST /api/verify is the only place it goes.

import { Grant, Report, parseReport } from "./schema.js";

export class ApiError extends Error {
  constructor(message: string, readonly retryable: boolean = false) {
    super(message);
  }
}

export interface DecisionAck {
  decision: string;
  note: string;
  recorded_at: number;
  seq: number;
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = await response.json();
    return typeof body?.detail === "string" ? body.detail : response.statusText;
  } catch {
    return response.statusText;
  }
}

export class VerifierApi {
  constructor(readonly baseUrl: string = "") {}

  /** Runs verification; returns the report plus the exact JSON text served. */
  async verify(grant: Grant): Promise<{ report: Report; rawJson: string }> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/api/verify`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(grant),
      });
    } catch (error) {
      throw new ApiError(`backend unreachable: ${error}`, true);
    }
    if (response.status >= 500) {
      throw new ApiError(await detailOf(response), true);
    }
    if (!response.ok) {
      throw new ApiError(await detailOf(response));
    }
    const rawJson = await response.text();
    return { report: parseReport(rawJson), rawJson };
  }

  async getReport(reportId: string): Promise<Report> {
    const response = await fetch(`${this.baseUrl}/api/report/${reportId}`);
    if (!response.ok) throw new ApiError(await detailOf(response));
    return parseReport(await response.text());
  }

  async submitDecision(
    reportId: string,
    decision: string,
    note: string,
  ): Promise<DecisionAck> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/api/decision`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ report_id: reportId, decision, note }),
      });
    } catch (error) {
      throw new ApiError(`backend unreachable: ${error}`, true);
    }
    if (!response.ok) throw new ApiError(await detailOf(response), response.status >= 500);
    return (await response.json()) as DecisionAck;
  }
}
