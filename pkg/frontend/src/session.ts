// Console session state machine. The console never sees seeds or signing
// keys: a session holds at most one parsed grant and the latest served
// report. Decisions are guarded so one confirmation appends exactly one
// log entry.

import { VerifierApi, DecisionAck } from "./api.js";
import {
  Grant,
  GrantSummary,
  Report,
  parseGrant,
  summarizeGrant,
} from "./schema.js";

export type Role = "subject" | "verifier";

export class ConsoleSession {
  role: Role = "verifier";
  grant: Grant | null = null;
  report: Report | null = null;
  reportRawJson: string | null = null;
  private decisionInFlight = false;
  private decisionRecorded = false;

  constructor(readonly api: VerifierApi) {}

  /** Parse a grant file; a malformed file throws and changes nothing. */
  loadGrant(text: string): GrantSummary {
    const grant = parseGrant(text);
    this.grant = grant;
    this.report = null;
    this.reportRawJson = null;
    this.decisionRecorded = false;
    return summarizeGrant(grant);
  }

  get canVerify(): boolean {
    return this.grant !== null;
  }

  /** Decision buttons stay disabled until a report exists. */
  get canDecide(): boolean {
    return this.report !== null && !this.decisionInFlight && !this.decisionRecorded;
  }

  async runVerification(): Promise<Report> {
    if (this.grant === null) {
      throw new Error("load a grant before verifying");
    }
    const { report, rawJson } = await this.api.verify(this.grant);
    this.report = report;
    this.reportRawJson = rawJson;
    this.decisionRecorded = false;
    return report;
  }

  /**
   * Submit one decision for the displayed report. Returns null when the
   * submission is suppressed (no report, already in flight, or already
   * confirmed); call allowAnotherDecision() to deliberately record again.
   */
  async submitDecision(decision: string, note: string): Promise<DecisionAck | null> {
    if (!this.canDecide || this.report === null) {
      return null;
    }
    this.decisionInFlight = true;
    try {
      const ack = await this.api.submitDecision(this.report.report_id, decision, note);
      this.decisionRecorded = true;
      return ack;
    } finally {
      this.decisionInFlight = false;
    }
  }

  allowAnotherDecision(): void {
    this.decisionRecorded = false;
  }
}
