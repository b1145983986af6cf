# Paths
DATA_PATH = "data"
LEDGER_URL = "sqlite:///./sc_forge_runs.db"

# Report envelope
REPORT_SCHEMA = "sc-forge.report/1"
CERT_EXACT = "exact finite check"
CERT_PROBE = "finite-scale probe"
CERT_FINITE = "finite certificate"

# Internal letter encoding: generator i -> chr(CODE_BASE + 2i), its inverse -> chr(CODE_BASE + 2i + 1).
# CODE_BASE is even so that inversion is `code ^ 1`; all codes stay below 256.
CODE_BASE = 32
MAX_GENERATORS = 112

# Presentation text format
INVERSE_MARK = "'"
COMMENT_MARK = "#"
RESERVED_SYMBOLS = frozenset({INVERSE_MARK, COMMENT_MARK, ":"})
HEADER_ALPHABET = "alphabet"
HEADER_T_ALPHABET = "t-alphabet"
HEADER_MORSE_LETTER = "morse-letter"

# Construction defaults
DEFAULT_T_LETTERS = ("s", "t")
DEFAULT_MORSE_LETTER = "a"
PARAM_FLOOR = 36

# Exact arithmetic
DYADIC_BITS = 64
INTERVAL_PREC = 128
MAX_INTERVAL_PREC = 4096
THRESHOLD_SCAN_LIMIT = 1 << 22

# Search structures
PIECE_KEY_WIDTH = 16
BFS_STATE_CAP = 200_000
