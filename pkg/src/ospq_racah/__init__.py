"""Racah problem for osp_q(1|2) and q-analogs of the Bannai-Ito polynomials."""
from .bargmann import ModuleLabel, build_module, tensor3_block
from .errors import OspqError
from .polyfamilies import (ABCDParams, ClassicalBIParams, PRacahParams, classical_bi_eval,
                           pracah_eval, qbi_eval_hypergeometric, qbi_eval_recurrence)
from .qbialgebra import build_instance, build_rep, labels_from
from .qkernel import QContext, q_number, q_pochhammer
from .racah import (para_map, racah_by_diagonalization, racah_by_tensor, racah_closed_form,
                    racah_table)

__all__ = [
    "ABCDParams", "ClassicalBIParams", "ModuleLabel", "OspqError", "PRacahParams", "QContext",
    "build_instance", "build_module", "build_rep", "classical_bi_eval", "labels_from",
    "para_map", "pracah_eval", "q_number", "q_pochhammer", "qbi_eval_hypergeometric",
    "qbi_eval_recurrence", "racah_by_diagonalization", "racah_by_tensor", "racah_closed_form",
    "racah_table", "tensor3_block",
]
