"""Tapestry: desk-scale identity provenance.

Subjects distill online activity into encrypted trust evidence, anchor it
to a proof-of-work ledger through an off-chain data lake, and selectively
disclose decryption keys so a verifier can check provenance, spot
behavioural anomalies, and view a visual gist before making a human trust
decision.
"""

__version__ = "0.1.0"
