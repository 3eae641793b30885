"""Exact analyses of quantitative automata: values, safety closures, constancy, safety, liveness."""

__version__ = "0.1.0"

from .core import (Automaton, LassoWord, ParseError, QuantsafeError, TotalityError, Transition,
                   UnsupportedError, ValidationError, ValueFunction, constant_automaton, dsum,
                   parse_automaton, reroot, serialize_automaton)
from .evaluate import evaluate_lasso, monotone_form, state_top_values, top_value
from .closure import determinize_inf, safety_closure_inf, safety_closure_val
from .decide import Verdict, is_constant, is_constant_dsum, is_constant_limavg, is_live, is_safe
from .decompose import decompose, determinize_liminf, determinize_sup
