"""
Unit tests for Realization Module.
Tests Euler realizations, beta and beta_mu2, and the knowledge base.
"""

from fractions import Fraction

import pytest
import sympy

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from groth_core import (
    FaceHypersurface,
    GrothElem,
    face_hypersurface,
    gm,
    kummer,
    monomial_torsor,
    named,
    theta,
)
from milnor_calc import motivic_fiber_b
from newton_engine import LaurentPoly
from realize_maps import (
    U,
    KBEntry,
    KnowledgeBase,
    RealizationError,
    atom_id,
    beta,
    beta_lim,
    beta_mu2,
    beta_puR,
    default_knowledge_base,
    realize_complex,
    realize_real,
)

CURVE = LaurentPoly.from_dict({(6, 0): 1, (2, 2): 1, (0, 6): 1})


@pytest.fixture
def empty_kb():
    return KnowledgeBase()


class TestEulerRealizations:
    """Test suite for realize_complex and realize_real."""

    def test_complex_basics(self, empty_kb):
        assert realize_complex(gm(), empty_kb) == 0
        assert realize_complex(kummer(5), empty_kb) == 5
        assert realize_complex(GrothElem.affine(-3), empty_kb) == 1

    def test_real_basics(self, empty_kb):
        assert realize_real(gm(), empty_kb) == -2
        assert realize_real(kummer(4, "R", -1), empty_kb) == 0
        assert realize_real(kummer(4, "R"), empty_kb) == 2
        assert realize_real(kummer(3, "R"), empty_kb) == 1

    def test_face_curve(self, empty_kb):
        face = face_hypersurface({(2, 0): 1, (0, 3): 1}, "C", 1, (Fraction(1, 2), Fraction(1, 3)))
        assert realize_complex(face, empty_kb) == -6

    def test_degenerate_face_rejected(self, empty_kb):
        terms = (((0, 2), Fraction(1)), ((1, 1), Fraction(2)), ((2, 0), Fraction(1)))
        with pytest.raises(RealizationError, match="degenerate"):
            realize_complex(GrothElem.atom(FaceHypersurface(terms, "C")), empty_kb)
        with pytest.raises(RealizationError, match="degenerate"):
            realize_real(GrothElem.atom(FaceHypersurface(terms, "R")), empty_kb)

    def test_real_torsor_splits_by_sign(self, empty_kb):
        assert realize_real(monomial_torsor([[4]], [2], "R"), empty_kb) == 2
        assert realize_real(monomial_torsor([[4]], [2], "R", [-1]), empty_kb) == 0
        assert realize_real(monomial_torsor([[2, 0], [0, 4]], [1, 2], "R"), empty_kb) == 4

    def test_field_mismatch(self, empty_kb):
        with pytest.raises(RealizationError):
            realize_real(kummer(4, "C"), empty_kb)

    def test_named_needs_entry(self, empty_kb):
        with pytest.raises(RealizationError, match="register KB entry"):
            realize_complex(named("K3-surface"), empty_kb)
        empty_kb.register("C:named:K3-surface", "chi_complex", 24)
        assert realize_complex(named("K3-surface"), empty_kb) == 24


class TestBeta:
    """Test suite for the virtual Poincare realizations on the curve example."""

    def test_beta_vanishes(self):
        assert beta(motivic_fiber_b(CURVE, "R")) == 0

    def test_beta_mu2(self):
        assert sympy.expand(beta_mu2(motivic_fiber_b(CURVE, "R")) - (U + 1)) == 0

    def test_beta_lim_and_pinned(self):
        assert beta_lim(CURVE) == 0
        assert sympy.expand(beta_puR(CURVE) - (1 + U)) == 0

    def test_beta_multiplicative_on_rules(self, empty_kb):
        x, y = kummer(2, "R") * gm(), kummer(3, "R") - GrothElem.affine(2)
        assert sympy.expand(beta(x * y, empty_kb) - beta(x, empty_kb) * beta(y, empty_kb)) == 0

    def test_trivial_action_series(self, empty_kb):
        value = beta_mu2(GrothElem.one(), empty_kb)
        assert sympy.simplify(value - U / (U - 1)) == 0

    def test_free_swap_quotient(self, empty_kb):
        assert beta_mu2(theta(kummer(2, "R")), empty_kb) == 1

    def test_missing_curve_entry(self, empty_kb):
        with pytest.raises(RealizationError):
            beta(motivic_fiber_b(CURVE, "R"), empty_kb)

    def test_missing_pinned_fiber(self, empty_kb):
        with pytest.raises(RealizationError):
            beta_puR(CURVE, empty_kb)


class TestKnowledgeBase:
    """Test suite for loading and registering entries."""

    def test_default_has_curve_entries(self):
        kb = default_knowledge_base()
        assert kb.lookup("R:face:x^6+x^2y^2=1:affine", "beta").value == "u-1"
        assert len(kb) >= 5

    def test_load(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("# comment\n\nC:named:pt\tchi_complex\t1\tuser\n", encoding="utf-8")
        kb = KnowledgeBase.load(str(path))
        assert kb.entries() == [KBEntry("C:named:pt", "chi_complex", "1", "user")]

    def test_load_missing_file(self, tmp_path):
        assert len(KnowledgeBase.load(str(tmp_path / "absent.tsv"))) == 0

    def test_load_malformed(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("C:named:pt\tchi_complex\n", encoding="utf-8")
        with pytest.raises(RealizationError):
            KnowledgeBase.load(str(path))

    def test_conflicting_register(self, empty_kb):
        empty_kb.register("C:named:pt", "chi_complex", 1)
        empty_kb.register("C:named:pt", "chi_complex", 1)
        with pytest.raises(RealizationError):
            empty_kb.register("C:named:pt", "chi_complex", 2)

    def test_unknown_realization(self, empty_kb):
        with pytest.raises(RealizationError):
            empty_kb.register("C:named:pt", "hodge", 1)

    def test_atom_ids(self):
        (k,) = kummer(4, "R", -1).atoms()
        assert atom_id(k) == "R:kummer:4:-"
        (face,) = theta(face_hypersurface({(6, 0): 1, (2, 2): 1}, "R", 1,
                                          (Fraction(1, 6), Fraction(1, 3)))).atoms()
        assert atom_id(face) == "R:face:x^6+x^2y^2=1:torus"
        assert atom_id(face, with_action=True) == "R:face:x^6+x^2y^2=1:torus~swap(1,0)"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
