"""Exact computer algebra for the dGBV algebra of a Calabi-Yau complete intersection."""
from .algebra import SuperPolynomial, apply_Delta, apply_K, apply_Q, ell2, parse_poly, render
from .errors import DomainError
from .fmanifold import FManifoldOutput, solve_f_manifold, verify_f_axioms, verify_ind_qm
from .frobenius import (FrobeniusData, check_h3_condition, check_h4_condition, frobenius_structure,
                        modified_pairing, pairing_from_primitive, rhb_check, star, verify_frobenius_axioms,
                        verify_pairing_axioms)
from .gaussmanin import ConnectionContext, hnabla_t, nabla_hbar_inv, nabla_t, reduce_class
from .groebner import Setup, charge_zero_basis, jacobian_groebner, prepare, reduce_to_basis
from .model import ModelSetup, build_model, example, load_model
from .primitive import (PrimitiveOutput, b_term, flatness_defects, solve_weak_primitive, solve_zeta_truncated,
                        v_term, verify_gcm)
from .series import Series, SymTensor
from .verify import SuiteConfig, run_suite

__all__ = [
    "SuperPolynomial", "apply_Delta", "apply_K", "apply_Q", "ell2", "parse_poly", "render",
    "DomainError",
    "FManifoldOutput", "solve_f_manifold", "verify_f_axioms", "verify_ind_qm",
    "FrobeniusData", "check_h3_condition", "check_h4_condition", "frobenius_structure", "modified_pairing",
    "pairing_from_primitive", "rhb_check", "star", "verify_frobenius_axioms", "verify_pairing_axioms",
    "ConnectionContext", "hnabla_t", "nabla_hbar_inv", "nabla_t", "reduce_class",
    "Setup", "charge_zero_basis", "jacobian_groebner", "prepare", "reduce_to_basis",
    "ModelSetup", "build_model", "example", "load_model",
    "PrimitiveOutput", "b_term", "flatness_defects", "solve_weak_primitive", "solve_zeta_truncated",
    "v_term", "verify_gcm",
    "Series", "SymTensor",
    "SuiteConfig", "run_suite",
]
