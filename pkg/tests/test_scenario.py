import json

import pytest

from sightline.core import EntityKind
from sightline.errors import (
    CorruptSnapshot,
    DuplicateName,
    FormatMismatch,
    IoError,
    MalformedLine,
    ScenarioSyntaxError,
    UnresolvedReference,
    VersionMismatch,
)
from sightline.io.dsl import build_systems, load_scenario, parse_scenario, serialize_scenario
from sightline.io.events import load_events
from sightline.io.reports import render_report, write_report
from sightline.io.snapshots import load_snapshot, save_snapshot
from sightline.io.tables import load_graph, load_pairs, load_table
from sightline.provenance import evaluate_reliability
from sightline.surveillance import Comparator, SurveillanceReport, ReportMeta, QuarantineCounts

BUNDLED = ("anpr_carpark.svl", "smartphone_zone.svl", "social_feed.svl")


class TestParse:
    def test_minimal_scenario(self):
        model = parse_scenario('scheme REG { mask = "LLDDLLL" }\n')
        assert set(model.schemes) == {"REG"} and not model.systems

    def test_bundled_carpark_scenario(self, fixtures):
        model = load_scenario(str(fixtures / "anpr_carpark.svl"))
        assert model.schemes["REG"].mask == "LLDDLLL"
        overstay = model.attributes["Overstay"]
        assert overstay.kind == "session"
        assert overstay.threshold_ms == 7_200_000
        assert overstay.comparator is Comparator.GT
        assert model.tables["keepers"].file == "dvla_keepers.csv"
        assert model.observe.key == "plate"
        assert model.sort_keys == (frozenset({"Overstay"}),)

    def test_undeclared_scheme_reference(self):
        with pytest.raises(UnresolvedReference) as info:
            parse_scenario("observe { key = plate scheme = GHOST }\n")
        assert info.value.line == 1 and info.value.ref == "GHOST"

    def test_forward_references_allowed(self):
        text = (
            "ims sys { scheme = REG bind car -> AB12CDE }\n"
            "entity car kind = vehicle\n"
            'scheme REG { mask = "LLDDLLL" }\n'
        )
        model = parse_scenario(text)
        assert model.systems["sys"].binds == (("car", "AB12CDE"),)

    def test_comments_and_blanks_ignored(self):
        text = '# heading\n\nscheme A { mask = "D" }  # trailing\n'
        assert set(parse_scenario(text).schemes) == {"A"}

    def test_duplicate_scheme_name(self):
        text = 'scheme A { mask = "D" }\nscheme A { mask = "L" }\n'
        with pytest.raises(DuplicateName) as info:
            parse_scenario(text)
        assert info.value.line == 2

    def test_bind_value_checked_against_mask(self):
        text = (
            'scheme REG { mask = "LLDDLLL" }\n'
            "entity car kind = vehicle\n"
            "ims sys { scheme = REG bind car -> NOPE }\n"
        )
        with pytest.raises(FormatMismatch) as info:
            parse_scenario(text)
        assert "line 3" in str(info.value)

    def test_entity_kind_parsed(self):
        model = parse_scenario("entity holder kind = account-holder\n")
        assert model.entities["holder"].kind is EntityKind.ACCOUNT_HOLDER

    def test_sort_key_unknown_attribute(self):
        text = 'attribute A { instant k = "1" }\nsort { A + Ghost }\n'
        with pytest.raises(UnresolvedReference) as info:
            parse_scenario(text)
        assert info.value.ref == "Ghost" and info.value.line == 2

    def test_syntax_error_carries_line_and_column(self):
        with pytest.raises(ScenarioSyntaxError) as info:
            parse_scenario('scheme REG ( mask = "L" )\n')
        assert info.value.line == 1 and info.value.column == 12

    def test_unknown_keyword(self):
        with pytest.raises(ScenarioSyntaxError) as info:
            parse_scenario("banana REG {}\n")
        assert info.value.line == 1 and info.value.column == 1

    def test_in_list_reference(self):
        model = parse_scenario('attribute Z { instant loc in ["a", "b"] }\n')
        assert model.attributes["Z"].reference == frozenset({"a", "b"})


class TestRoundTrip:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled_scenarios_round_trip(self, fixtures, name):
        model = load_scenario(str(fixtures / name))
        again = parse_scenario(serialize_scenario(model))
        assert again == model

    def test_round_trip_is_stable_text(self, fixtures):
        model = load_scenario(str(fixtures / "anpr_carpark.svl"))
        text = serialize_scenario(model)
        assert serialize_scenario(parse_scenario(text)) == text


class TestEvents:
    def test_sorted_by_time(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text(
            '{"t": 30, "loc": "x", "payload": {"a": "1"}}\n'
            '{"t": 10, "loc": "x", "payload": {"a": "2"}}\n'
            '{"t": 20, "loc": "x", "payload": {"a": "3"}}\n'
        )
        records = load_events(str(p))
        assert [r.event.t for r in records] == [10, 20, 30]

    def test_stable_on_equal_times(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text(
            '{"t": 10, "loc": "x", "payload": {"a": "first"}}\n'
            '{"t": 10, "loc": "x", "payload": {"a": "second"}}\n'
        )
        records = load_events(str(p))
        assert [r.event.payload["a"] for r in records] == ["first", "second"]
        assert [r.line for r in records] == [1, 2]

    def test_empty_file(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text("")
        assert load_events(str(p)) == []

    def test_malformed_second_line(self, tmp_path):
        p = tmp_path / "e.jsonl"
        p.write_text('{"t": 1, "loc": "x", "payload": {"a": "1"}}\n{oops}\n')
        with pytest.raises(MalformedLine) as info:
            load_events(str(p))
        assert info.value.line == 2

    @pytest.mark.parametrize(
        "line",
        [
            '{"loc": "x", "payload": {"a": "1"}}',
            '{"t": -1, "loc": "x", "payload": {"a": "1"}}',
            '{"t": 1, "loc": 2, "payload": {"a": "1"}}',
            '{"t": 1, "loc": "x", "payload": {}}',
            '{"t": 1, "loc": "x", "payload": {"a": 3}}',
            '{"t": 1, "loc": "x", "payload": {"a": "1"}, "extra": true}',
        ],
    )
    def test_schema_violations(self, tmp_path, line):
        p = tmp_path / "e.jsonl"
        p.write_text(line + "\n")
        with pytest.raises(MalformedLine):
            load_events(str(p))

    def test_missing_file(self):
        with pytest.raises(IoError):
            load_events("/nonexistent/events.jsonl")


def empty_report() -> SurveillanceReport:
    return SurveillanceReport((), (), ReportMeta(0, 0, QuarantineCounts(), 0))


class TestReports:
    def test_same_report_twice_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_report(empty_report(), str(a))
        write_report(empty_report(), str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_empty_report_structure(self):
        doc = json.loads(render_report(empty_report()))
        assert doc["schema"] == 1
        assert doc["categories"] == [] and doc["entries"] == []

    def test_table_format_renders(self):
        text = render_report(empty_report(), "table")
        assert "IDENTIFIER" in text and "events_total=0" in text

    def test_golden_fixture(self, fixtures, pipeline):
        sorting = pipeline("anpr_carpark")
        golden = (fixtures / "anpr_carpark_report.golden.json").read_text()
        assert render_report(sorting) == golden


class TestSnapshots:
    def build(self):
        text = (
            'scheme D3 { mask = "D{3}" }\n'
            "entity e1 kind = person\n"
            "ims reg { scheme = D3 bind e1 -> 500 }\n"
        )
        model = parse_scenario(text)
        systems = build_systems(model)
        systems["reg"].generate("e1")
        systems["reg"].generate("e1")
        systems["reg"].revoke("001")
        return model, systems

    def test_round_trip(self, tmp_path):
        model, systems = self.build()
        path = tmp_path / "s.json"
        save_snapshot(model, systems, str(path))
        model2, systems2 = load_snapshot(str(path))
        assert model2 == model
        assert systems2 == systems
        assert systems2["reg"].serial == systems["reg"].serial

    def test_serial_counter_survives(self, tmp_path):
        model, systems = self.build()
        path = tmp_path / "s.json"
        save_snapshot(model, systems, str(path))
        _, systems2 = load_snapshot(str(path))
        # 001 was revoked: the reloaded system must not hand it out again.
        assert systems2["reg"].generate("e1").value == "003"

    def test_missing_file(self):
        with pytest.raises(IoError):
            load_snapshot("/nonexistent/s.json")

    def test_truncated_file(self, tmp_path):
        model, systems = self.build()
        path = tmp_path / "s.json"
        save_snapshot(model, systems, str(path))
        whole = path.read_text()
        path.write_text(whole[: len(whole) // 2])
        with pytest.raises(CorruptSnapshot):
            load_snapshot(str(path))

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text('{"version": 99, "scenario": "", "systems": {}}')
        with pytest.raises(VersionMismatch):
            load_snapshot(str(path))

    def test_wrong_shape(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text('{"version": 1, "scenario": "", "systems": {"x": {"serial": -2}}}')
        with pytest.raises(CorruptSnapshot):
            load_snapshot(str(path))


class TestTables:
    def test_load_table_canonicalizes(self, fixtures):
        table = load_table(str(fixtures / "dvla_keepers.csv"))
        assert table.from_scheme == "REG" and table.to_scheme == "KEEPER"
        assert table.rows == {"AB12CDE": "K0042", "CD34EFG": "K0117"}

    def test_duplicate_source_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("A,B\nX01,Y01\nX01,Y02\n")
        with pytest.raises(MalformedLine) as info:
            load_table(str(p))
        assert info.value.line == 3

    def test_header_required(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("")
        with pytest.raises(MalformedLine):
            load_table(str(p))

    def test_load_pairs(self, fixtures):
        assoc = load_pairs(str(fixtures / "keeper_pairs.csv"))
        assert ("AB12CDE", "keeper-42") in assoc.pairs

    def test_pairs_header_enforced(self, tmp_path):
        p = tmp_path / "p.csv"
        p.write_text("id,who\nX,e\n")
        with pytest.raises(MalformedLine):
            load_pairs(str(p))

    def test_load_graph_fixture(self, fixtures):
        g = load_graph(str(fixtures / "identity_tree.jsonl"))
        assert evaluate_reliability(g, "bank-account") == pytest.approx(0.5346)

    def test_graph_bad_source(self, tmp_path):
        p = tmp_path / "g.jsonl"
        p.write_text('{"id": "a", "source": "hearsay"}\n')
        with pytest.raises(MalformedLine):
            load_graph(str(p))

    def test_graph_duplicate_id(self, tmp_path):
        p = tmp_path / "g.jsonl"
        p.write_text('{"id": "a", "source": "commercial"}\n{"id": "a", "source": "commercial"}\n')
        with pytest.raises(MalformedLine) as info:
            load_graph(str(p))
        assert info.value.line == 2
