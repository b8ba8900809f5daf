"""Smooth gadgets built on normalized difference equations, their gluing,
the final-value encoding and the reduction back to truth values."""

from .params import GadgetParams, ParameterError, Polynomial, make_params
from .family import Decomposition, Gadget, clear_cache, gadget_for
from .glue import (GlueLayout, GlueSlot, code_of, glue_deriv_eval, glue_g_eval,
                   glue_gamma, glue_h_eval)
from .finalvalue import (DEFAULT_HORIZON, FinalValueParams, HorizonError,
                         decode_tally, final_value_name, tally_instance)
from .reduction import glued_h_oracle, reduce_instance

__all__ = [
    "GadgetParams", "ParameterError", "Polynomial", "make_params",
    "Decomposition", "Gadget", "clear_cache", "gadget_for",
    "GlueLayout", "GlueSlot", "code_of", "glue_deriv_eval", "glue_g_eval",
    "glue_gamma", "glue_h_eval",
    "DEFAULT_HORIZON", "FinalValueParams", "HorizonError", "decode_tally",
    "final_value_name", "tally_instance",
    "glued_h_oracle", "reduce_instance",
]
