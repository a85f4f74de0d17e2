from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfcrit import PhiSpec, PsiSpec, SpecError, ThetaSpec
from cfcrit.specfiles import (
    format_phi,
    format_psi,
    format_theta,
    parse_phi,
    parse_psi,
    parse_theta,
)


class TestTheta:
    def test_explicit_roundtrip(self):
        spec = ThetaSpec(kind="explicit", quotients=(1, 2, 3, 4))
        assert parse_theta(format_theta(spec)) == spec

    def test_periodic_roundtrip(self):
        spec = ThetaSpec(kind="periodic", preperiod=(0, 2), period=(1, 5))
        assert parse_theta(format_theta(spec)) == spec

    def test_growth_rule_roundtrip(self):
        spec = ThetaSpec(kind="growth_rule", rule="qk_pow_k", preperiod=(0, 1), bit_cap=10**7)
        assert parse_theta(format_theta(spec)) == spec

    def test_e_pattern(self):
        assert parse_theta("kind = e_pattern\n").kind == "e_pattern"

    def test_comments_and_commas(self):
        spec = parse_theta("# a theta\nkind = explicit\nquotients = 1, 2, 3  # tail\n")
        assert spec.quotients == (1, 2, 3)

    def test_errors_name_the_field(self):
        with pytest.raises(SpecError, match="'kind'"):
            parse_theta("quotients = 1 2\n")
        with pytest.raises(SpecError, match="'quotients'"):
            parse_theta("kind = explicit\nquotients = 1 x\n")
        with pytest.raises(SpecError, match="expected 'key = value'"):
            parse_theta("kind explicit\n")
        with pytest.raises(SpecError, match="unknown value"):
            parse_theta("kind = mystery\n")

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=10**30), min_size=1, max_size=20))
    def test_big_quotients_roundtrip_exact(self, quots):
        spec = ThetaSpec(kind="explicit", quotients=tuple(quots))
        assert parse_theta(format_theta(spec)).quotients == tuple(quots)


class TestPsi:
    def test_closed_form_roundtrip(self):
        psi = PsiSpec(kind="closed_form", family="khinchin_log", c=Fraction(3, 7))
        got = parse_psi(format_psi(psi))
        assert got == psi and got.c == Fraction(3, 7)

    def test_step_roundtrip_exact(self):
        psi = PsiSpec(
            kind="step",
            breakpoints=(1, 2, 8, 64),
            values=(Fraction(1, 2), Fraction(1, 8), Fraction(1, 64)),
        )
        got = parse_psi(format_psi(psi))
        assert got.breakpoints == psi.breakpoints
        assert got.values == psi.values  # exact rationals, no float trip

    def test_phi_dual_roundtrip(self):
        psi = PsiSpec(kind="phi_dual", phi=PhiSpec(kind="closed_form", family="log_sq", c=2.0))
        got = parse_psi(format_psi(psi))
        assert got.kind == "phi_dual"
        assert got.phi.family == "log_sq" and got.phi.c == 2.0

    def test_bad_values_named(self):
        with pytest.raises(SpecError, match="'values'"):
            parse_psi("kind = step\nbreakpoints = 1 4\nvalues = huh\n")
        with pytest.raises(SpecError, match="unknown psi value"):
            parse_psi("kind = nope\n")


class TestPhi:
    def test_closed_form_roundtrip(self):
        phi = PhiSpec(kind="closed_form", family="log", c=0.5)
        got = parse_phi(format_phi(phi))
        assert got.family == "log" and got.c == 0.5

    def test_step_roundtrip_float_exact(self):
        phi = PhiSpec(kind="step", breakpoints=(1, 5, 34), values=(1.6094379124341003, 3.5263605246161616))
        got = parse_phi(format_phi(phi))
        assert got.values == phi.values  # repr round-trips floats exactly

    def test_psi_dual_not_serializable(self):
        phi = PhiSpec(kind="psi_dual", psi=PsiSpec(kind="closed_form", family="one_over_q"))
        with pytest.raises(SpecError, match="serialize the psi"):
            format_phi(phi)
