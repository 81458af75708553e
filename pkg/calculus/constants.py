"""
Calculus configuration constants
"""
from pathlib import Path

# =============================================================================
# TYPES AND PRIMITIVES
# =============================================================================

GROUND_TYPES = ('Int', 'Bool')

# Primitive signatures: operator -> (argument ground types, result ground type)
PRIMITIVES = {
    'add': (('Int', 'Int'), 'Int'),
    'sub': (('Int', 'Int'), 'Int'),
    'mul': (('Int', 'Int'), 'Int'),
    'eq': (('Int', 'Int'), 'Bool'),
    'not': (('Bool',), 'Bool'),
}

# Infix spelling of binary primitives (printer and parser agree on these)
INFIX_PRIMITIVES = {
    'add': '+',
    'sub': '-',
    'mul': '*',
    'eq': '==',
}


# =============================================================================
# EVALUATION
# =============================================================================

# Names used by closures synthesized when a coercion is applied to a function.
# They contain '%', which no source identifier can.
WRAPPED_FUNCTION_NAME = 'f%'
WRAPPED_ARGUMENT_NAME = 'y%'
SAMPLE_STREAM_NAME = 's%'

# Finite steps at which a thunk is forced when checking its type
THUNK_SAMPLE_STEPS = (1, 2)


# =============================================================================
# RENDERING
# =============================================================================

STOP_TEXT = '•'
THUNK_TEXT = '<thunk>'
CLOSURE_TEXT = '<fun>'

# Node kinds emitted by `warplang eval --json`
VALUE_KINDS = ['stop', 'scalar', 'cons', 'pair', 'inj', 'closure', 'thunk', 'warped']


# =============================================================================
# COMMAND LINE
# =============================================================================

EXIT_CODES = {
    'ok': 0,
    'typing': 1,      # type errors and internal evaluation errors
    'parse': 2,       # syntax errors, malformed warps, duplicate names
}

# Spellings of ω accepted by --steps
OMEGA_STEPS = ('omega', 'w', 'ω')

CORPUS_DIR = Path(__file__).resolve().parent / 'corpus'
