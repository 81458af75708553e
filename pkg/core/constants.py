"""
Warp algebra configuration constants
"""

# =============================================================================
# LITERAL SYNTAX
# =============================================================================

# Named warps listed in CLI help; values are literal strings in canonical form.
NAMED_WARPS = {
    'id': '(1)',          # identity
    'zero': '(0)',        # least warp, nothing ever arrives
    'later': '{0}(1)',    # one step late
    'omega': '{w}(0)',    # everything at once, greatest warp
    'sooner': '{2}(1)',   # one step early
}


# =============================================================================
# RANDOM WARP GENERATION (property tests)
# =============================================================================

WARP_GENERATOR = {
    'MAX_PREFIX_LENGTH': 4,
    'MAX_PERIOD_LENGTH': 4,
    'MAX_ELEMENT': 3,
    'OMEGA_PROBABILITY': 0.05,   # chance of planting a single ω element
}

# Steps checked against the running-sum oracle.
ORACLE_HORIZON = 64
