"""JSON schemas for the machine-readable CLI output."""

_num = {"type": ["number", "null"]}
_int = {"type": "integer"}

SCORE_REPORT = {
    "type": "object",
    "required": ["n", "T", "L", "L_min", "L_r", "tau", "tau_min", "eta", "psi", "omega", "absent"],
    "properties": {
        "n": _int,
        "T": _int,
        "L": {"type": "number"},
        "L_min": {"type": "number"},
        "L_r": {"type": "number"},
        **{k: _num for k in ("tau", "tau_min", "eta", "psi", "omega", "rho", "rho_min",
                             "omega_rho", "pearson_r", "gamma")},
        "absent": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "additionalProperties": False,
}

SCORE = {
    "type": "object",
    "required": ["command", "label", "length", "report"],
    "properties": {
        "command": {"const": "score"},
        "label": {"type": "string"},
        "length": {"type": "string"},
        "report": SCORE_REPORT,
    },
    "additionalProperties": False,
}

LAW = {
    "type": "object",
    "required": ["command", "method", "rows"],
    "properties": {
        "command": {"const": "law"},
        "method": {"enum": ["kendall", "pearson"]},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "n", "T", "coefficient", "p_raw", "p_adjusted", "mark", "reason"],
                "properties": {
                    "label": {"type": "string"},
                    "n": _int,
                    "T": _int,
                    "coefficient": _num,
                    "p_raw": _num,
                    "p_adjusted": _num,
                    "mark": {"enum": ["***", "**", "*", "x", "-"]},
                    "reason": {"type": ["string", "null"]},
                },
            },
        },
    },
    "additionalProperties": False,
}

_score_stats = {
    "type": "object",
    "required": ["mean", "sd", "valid"],
    "properties": {"mean": _num, "sd": _num, "valid": _int},
}

NULL = {
    "type": "object",
    "required": ["command", "seed", "R", "rows"],
    "properties": {
        "command": {"const": "null"},
        "seed": _int,
        "R": _int,
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "L_min", "L_r", "eta_bound", "eta", "psi", "omega"],
                "properties": {
                    "label": {"type": "string"},
                    "L_min": {"type": "number"},
                    "L_r": {"type": "number"},
                    "eta_bound": _num,
                    "eta": _score_stats,
                    "psi": _score_stats,
                    "omega": _score_stats,
                    "p_L": _num,
                },
            },
        },
    },
    "additionalProperties": False,
}

CONVERGE = {
    "type": "object",
    "required": ["command", "label", "seed", "reps", "rows"],
    "properties": {
        "command": {"const": "converge"},
        "label": {"type": "string"},
        "seed": _int,
        "reps": _int,
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["t", "eta", "psi", "omega", "valid_eta", "valid_psi", "valid_omega"],
                "properties": {
                    "t": _int,
                    "eta": _num,
                    "psi": _num,
                    "omega": _num,
                    "valid_eta": _int,
                    "valid_psi": _int,
                    "valid_omega": _int,
                },
            },
        },
    },
    "additionalProperties": False,
}

_fit = {
    "type": "object",
    "required": ["slope", "intercept", "r", "S", "n"],
    "properties": {
        "slope": {"type": "number"},
        "intercept": {"type": "number"},
        "r": _num,
        "S": {"type": "number", "minimum": 0},
        "n": _int,
    },
}

RECODE = {
    "type": "object",
    "required": ["command", "op", "rows"],
    "properties": {
        "command": {"const": "recode"},
        "op": {"type": "string"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "before", "after"],
                "properties": {
                    "label": {"type": "string"},
                    "before": SCORE_REPORT,
                    "after": SCORE_REPORT,
                },
            },
        },
        "fits": {"type": "object", "additionalProperties": _fit},
    },
    "additionalProperties": False,
}

ALPHABET = {
    "type": "object",
    "required": ["command", "label", "mode", "kept", "excluded", "threshold", "sse", "A_before", "A_after"],
    "properties": {
        "command": {"const": "alphabet"},
        "label": {"type": "string"},
        "mode": {"enum": ["frequency", "cjk"]},
        "kept": {"type": "array", "items": {"$ref": "#/$defs/char"}},
        "excluded": {"type": "array", "items": {"$ref": "#/$defs/char"}},
        "threshold": _num,
        "sse": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "A_before": _int,
        "A_after": _int,
    },
    "$defs": {
        "char": {
            "type": "object",
            "required": ["char", "count", "log_frequency"],
            "properties": {
                "char": {"type": "string"},
                "count": _int,
                "log_frequency": {"type": "number"},
            },
        }
    },
    "additionalProperties": False,
}

SCHEMAS = {
    "score": SCORE,
    "law": LAW,
    "null": NULL,
    "converge": CONVERGE,
    "recode": RECODE,
    "alphabet": ALPHABET,
}
