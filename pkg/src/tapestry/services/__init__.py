"""HTTP surfaces (ledger RPC, lake API, verifier API) and their clients."""
