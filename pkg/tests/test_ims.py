from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sightline.core import Scheme
from sightline.errors import FormatMismatch, LengthMismatch, SchemeExhausted
from sightline.ims import (
    BiometricProfile,
    IdentityManagementSystem,
    biometric_match,
    render_serial,
)

D3 = Scheme("D3", "D{3}")


class TestGenerate:
    def test_first_value_under_digit_mask(self):
        ims = IdentityManagementSystem("t", D3)
        assert ims.generate("e").value == "001"

    def test_values_distinct_and_scheme_valid(self):
        ims = IdentityManagementSystem("t", D3)
        seen = {ims.generate("e").value for _ in range(50)}
        assert len(seen) == 50
        assert all(len(v) == 3 and v.isdigit() for v in seen)

    def test_exhaustion_at_capacity(self):
        ims = IdentityManagementSystem("t", D3)
        for _ in range(1000):
            ims.generate("e")
        with pytest.raises(SchemeExhausted):
            ims.generate("e")

    def test_generate_skips_bound_values(self):
        ims = IdentityManagementSystem("t", D3)
        ims.bind("e", "001")
        assert ims.generate("e").value == "002"

    def test_serial_monotone(self):
        ims = IdentityManagementSystem("t", D3)
        serials = []
        for _ in range(5):
            ims.generate("e")
            serials.append(ims.serial)
        assert serials == sorted(serials) and len(set(serials)) == 5

    def test_mixed_radix_rendering(self):
        s = Scheme("M", "LD")  # 26 * 10 positions
        assert render_serial(s, 0) == "A0"
        assert render_serial(s, 9) == "A9"
        assert render_serial(s, 10) == "B0"
        assert render_serial(s, 259) == "Z9"


class TestBindRevoke:
    def test_bind_validates_mask(self):
        ims = IdentityManagementSystem("t", D3)
        with pytest.raises(FormatMismatch):
            ims.bind("e", "12X")

    def test_bind_canonicalizes(self):
        ims = IdentityManagementSystem("t", Scheme("R", "LLDDLLL"))
        ident = ims.bind("car1", "ab12 cde")
        assert ident.value == "AB12CDE"

    def test_revoke_existing(self):
        ims = IdentityManagementSystem("t", D3)
        ident = ims.generate("e")
        assert ims.revoke(ident) is True
        assert ims.entity_authenticate("e", ident) is False

    def test_revoke_unknown(self):
        ims = IdentityManagementSystem("t", D3)
        assert ims.revoke("999") is False

    def test_revoked_value_never_reissued(self):
        ims = IdentityManagementSystem("t", Scheme("D2", "D{2}"))
        import random

        rng = random.Random(7)
        issued: list[str] = []
        ever: set[str] = set()
        for _ in range(100):
            if issued and rng.random() < 0.4:
                ims.revoke(rng.choice(issued))
            else:
                try:
                    value = ims.generate("e").value
                except SchemeExhausted:
                    break
                assert value not in ever
                ever.add(value)
                issued.append(value)


class TestAuthentication:
    def test_entity_authenticate_after_generate(self):
        ims = IdentityManagementSystem("t", D3)
        ident = ims.generate("e")
        assert ims.entity_authenticate("e", ident)
        assert not ims.entity_authenticate("other", ident)

    def test_identity_authenticate_same_entity(self):
        ims = IdentityManagementSystem("t", D3)
        i1, i2 = ims.generate("e"), ims.generate("e")
        assert ims.identity_authenticate(i1, i2)

    def test_identity_authenticate_different_entities(self):
        ims = IdentityManagementSystem("t", D3)
        i1, i2 = ims.generate("e1"), ims.generate("e2")
        assert not ims.identity_authenticate(i1, i2)

    @given(
        st.lists(
            st.tuples(st.sampled_from("012345678"), st.sampled_from(["a", "b", "c", "d", "e"])),
            max_size=16,
        )
    )
    def test_identity_authenticate_equals_entity_level_formula(self, raw):
        ims = IdentityManagementSystem("t", Scheme("D1", "D"))
        entities = set()
        for value, entity in raw:
            ims.bind(entity, value)
            entities.add(entity)
        values = {v for v, _ in raw}
        for i1 in values:
            for i2 in values:
                expected = any(
                    ims.entity_authenticate(e, i1) and ims.entity_authenticate(e, i2)
                    for e in entities
                )
                assert ims.identity_authenticate(i1, i2) == expected


class TestBiometric:
    def test_identical_profiles(self):
        p = BiometricProfile("e", (0, 1, 1, 0))
        out = biometric_match(p, p, Fraction(1))
        assert out.score == 1 and out.match

    def test_complementary_profiles(self):
        p = BiometricProfile("e1", (0, 0, 0, 0))
        q = BiometricProfile("e2", (1, 1, 1, 1))
        out = biometric_match(p, q, Fraction(1, 100))
        assert out.score == 0 and not out.match

    def test_two_of_four_hundred_differ(self):
        base = [0] * 400
        other = [0] * 400
        other[3] = other[250] = 1
        p = BiometricProfile("e1", tuple(base))
        q = BiometricProfile("e2", tuple(other))
        assert biometric_match(p, q, Fraction(99, 100)).match
        assert biometric_match(p, q, Fraction(99, 100)).score == Fraction(398, 400)
        assert not biometric_match(p, q, Fraction(999, 1000)).match

    def test_length_mismatch(self):
        p = BiometricProfile("e1", (0, 1))
        q = BiometricProfile("e2", (0, 1, 0))
        with pytest.raises(LengthMismatch):
            biometric_match(p, q, Fraction(1, 2))

    @given(
        st.lists(st.sampled_from([0, 1]), min_size=1, max_size=32),
        st.lists(st.sampled_from([0, 1]), min_size=1, max_size=32),
    )
    def test_symmetry(self, xs, ys):
        n = min(len(xs), len(ys))
        p = BiometricProfile("p", tuple(xs[:n]))
        q = BiometricProfile("q", tuple(ys[:n]))
        t = Fraction(1, 2)
        assert biometric_match(p, q, t) == biometric_match(q, p, t)
        assert biometric_match(p, p, t).score == 1


class TestSystemEquality:
    def test_equal_after_same_history(self):
        a = IdentityManagementSystem("t", D3)
        b = IdentityManagementSystem("t", D3)
        for ims in (a, b):
            ims.generate("e1")
            ims.bind("e2", "500")
            ims.revoke("001")
        assert a == b

    def test_serial_differences_detected(self):
        a = IdentityManagementSystem("t", D3)
        b = IdentityManagementSystem("t", D3)
        a.generate("e")
        b.bind("e", "001")
        assert a != b
