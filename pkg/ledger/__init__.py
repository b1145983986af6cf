# Run ledger
