import re

import pytest
from hypothesis import given, strategies as st

from sightline.core import (
    Credentials,
    CustomerAccount,
    Entity,
    EntityKind,
    Identifier,
    ObservationEvent,
    Provider,
    STANDARD_SCHEMES,
    Scheme,
    SocialMediaAccount,
    canonicalize,
    format_for_display,
    validate_format,
)
from sightline.errors import DuplicateName, SchemeError

NI = STANDARD_SCHEMES["NI"]
NHS = STANDARD_SCHEMES["NHS"]
PASSPORT = STANDARD_SCHEMES["PASSPORT"]
LICENCE = STANDARD_SCHEMES["LICENCE"]


class TestMaskExpansion:
    def test_repetition_expands(self):
        assert Scheme("X", "A{18}").length == 18
        assert Scheme("Y", "LLD{6}L").length == 9

    def test_literals_kept(self):
        s = Scheme("K", "KD{4}")
        assert s.length == 5
        assert validate_format("K1234", s).valid
        assert not validate_format("A1234", s).valid

    @pytest.mark.parametrize("mask", ["", "L{0}", "{3}", "D{", "D{x}", "D{}"])
    def test_bad_masks_rejected(self, mask):
        with pytest.raises(SchemeError):
            Scheme("BAD", mask)

    def test_display_groups_must_cover_mask(self):
        with pytest.raises(SchemeError):
            Scheme("X", "A{10}", display_groups=(3, 3, 3))
        with pytest.raises(SchemeError):
            Scheme("X", "A{10}", display_groups=(0, 10))

    def test_capacity(self):
        assert Scheme("X", "D{3}").capacity == 1000
        assert Scheme("X", "KD{4}").capacity == 10_000
        assert Scheme("X", "LL").capacity == 26 * 26


class TestValidateFormat:
    def test_ni_valid(self):
        result = validate_format("AB123456C", NI)
        assert result.valid and result.canonical == "AB123456C"

    def test_passport_valid(self):
        assert validate_format("123456789", PASSPORT).valid

    def test_ni_wrong_length(self):
        assert not validate_format("AB12345C", NI).valid

    def test_nhs_separators_stripped(self):
        result = validate_format("450 557 7104", NHS)
        assert result.valid and result.canonical == "4505577104"

    def test_case_folded(self):
        assert validate_format("ab123456c", NI).canonical == "AB123456C"

    def test_invalid_has_no_canonical(self):
        assert validate_format("???", NI).canonical is None

    @given(st.text(min_size=0, max_size=24))
    def test_canonicalization_idempotent(self, value):
        result = validate_format(value, LICENCE)
        if result.valid:
            again = validate_format(result.canonical, LICENCE)
            assert again.valid and again.canonical == result.canonical

    @given(st.text(alphabet="ABC123ab- xyz", min_size=0, max_size=20))
    def test_licence_matches_class_oracle(self, value):
        # Independent oracle: canonical strip, then a pure regex class test.
        stripped = "".join(c for c in value if c not in " -").upper()
        expected = re.fullmatch(r"[0-9A-Z]{18}", stripped) is not None
        assert validate_format(value, LICENCE).valid == expected


class TestDisplay:
    def test_nhs_grouping(self):
        shown = format_for_display(Identifier("NHS", "4505577104"), NHS)
        assert shown == "450 557 7104"

    def test_identity_without_groups(self):
        shown = format_for_display(Identifier("PASSPORT", "123456789"), PASSPORT)
        assert shown == "123456789"

    @given(st.text(alphabet="0123456789ABCDEFXYZ", min_size=10, max_size=10))
    def test_display_round_trip(self, value):
        ident = Identifier("NHS", value)
        assert validate_format(format_for_display(ident, NHS), NHS).canonical == value


class TestEventsAndEntities:
    def test_entity_kinds(self):
        assert Entity("k1", EntityKind.ACCOUNT_HOLDER).kind.value == "account-holder"

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            ObservationEvent(-1, "x", {"a": "b"})

    def test_empty_payload_rejected(self):
        with pytest.raises(ValueError):
            ObservationEvent(0, "x", {})

    def test_canonicalize_bare(self):
        assert canonicalize("ab 12-cd") == "AB12CD"


class TestAccounts:
    def test_history_append_only(self):
        acct = CustomerAccount(Credentials("ann", "h1"), {"name": "Ann"})
        grown = acct.record_transaction("deposit 10")
        assert acct.history == ()
        assert grown.history == ("deposit 10",)

    def test_interactions_append_only(self):
        acct = SocialMediaAccount(Credentials("ann", "h1"), {"bio": "hi"})
        grown = acct.record_interaction("posted").record_interaction("replied")
        assert grown.interactions == ("posted", "replied")

    def test_provider_rejects_duplicate_credentials(self):
        provider = Provider("bank")
        provider.register(CustomerAccount(Credentials("ann", "h1"), {}))
        with pytest.raises(DuplicateName):
            provider.register(CustomerAccount(Credentials("ann", "h2"), {}))

    def test_distinct_providers_may_share_user_names(self):
        a, b = Provider("bank"), Provider("site")
        a.register(CustomerAccount(Credentials("ann", "h1"), {}))
        b.register(SocialMediaAccount(Credentials("ann", "h2"), {}))
        assert a.account("ann") is not None and b.account("ann") is not None
