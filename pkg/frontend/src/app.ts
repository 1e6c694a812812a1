// DOM wiring for the console page. All rendering goes through the pure
// functions in render.ts; backend calls are sequential with visible
// in-flight state.

import { VerifierApi, ApiError } from "./api.js";
import {
  renderDecisionConfirmation,
  renderError,
  renderGrantSummary,
  renderReport,
} from "./render.js";
import { SchemaError } from "./schema.js";
import { ConsoleSession } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function bootstrap(): void {
  const session = new ConsoleSession(new VerifierApi(""));
  const grantInput = el<HTMLInputElement>("grant-file");
  const grantSummary = el<HTMLDivElement>("grant-summary");
  const verifyButton = el<HTMLButtonElement>("verify-button");
  const reportView = el<HTMLDivElement>("report");
  const decisionBar = el<HTMLDivElement>("decision-bar");
  const noteInput = el<HTMLInputElement>("decision-note");
  const confirmation = el<HTMLDivElement>("confirmation");
  const decisionButtons = Array.from(
    decisionBar.querySelectorAll<HTMLButtonElement>("button[data-decision]"),
  );

  function syncControls(): void {
    verifyButton.disabled = !session.canVerify;
    for (const button of decisionButtons) {
      button.disabled = !session.canDecide;
    }
    noteInput.disabled = !session.canDecide;
  }

  grantInput.addEventListener("change", async () => {
    confirmation.innerHTML = "";
    reportView.innerHTML = "";
    const file = grantInput.files?.[0];
    if (!file) return;
    try {
      const summary = session.loadGrant(await file.text());
      grantSummary.innerHTML = renderGrantSummary(summary);
    } catch (error) {
      if (error instanceof SchemaError) {
        grantSummary.innerHTML = renderError(`Grant rejected: ${error.message}`);
      } else {
        grantSummary.innerHTML = renderError(`Could not read the file: ${error}`);
      }
    }
    syncControls();
  });

  verifyButton.addEventListener("click", async () => {
    confirmation.innerHTML = "";
    verifyButton.disabled = true;
    reportView.innerHTML = `<div class="banner">Verifying&hellip;</div>`;
    try {
      const report = await session.runVerification();
      reportView.innerHTML = renderReport(report);
    } catch (error) {
      if (error instanceof ApiError && error.retryable) {
        reportView.innerHTML = renderError(
          `Backend unavailable (${error.message}); try again.`,
        );
      } else {
        reportView.innerHTML = renderError(`Verification failed: ${error}`);
      }
    }
    syncControls();
  });

  for (const button of decisionButtons) {
    button.addEventListener("click", async () => {
      const decision = button.dataset.decision ?? "undecided";
      syncControls();
      try {
        const ack = await session.submitDecision(decision, noteInput.value);
        if (ack !== null) {
          confirmation.innerHTML = renderDecisionConfirmation(ack.decision, ack.seq);
        }
      } catch (error) {
        // the decision stays unsent; the user may retry
        session.allowAnotherDecision();
        confirmation.innerHTML = renderError(`Decision not recorded: ${error}`);
      }
      syncControls();
    });
  }

  syncControls();
}

if (typeof document !== "undefined" && document.getElementById("grant-file")) {
  bootstrap();
}
