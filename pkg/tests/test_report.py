import csv
import json

import pytest

from unihet import (
    ClusteredIdeal,
    Dataset,
    DesiredIdeal,
    DesiredSpec,
    HeterogeneityReport,
    StudentRecord,
    UniformIdeal,
    UniversityStats,
    aggregate,
    analyze,
    emit,
    load_report,
    plot_rows,
    preset,
    real_order,
    whatif_exclusion,
    write_plot,
    write_whatif,
)

from helpers import brute_hamming

TWO_TIER_SPEC = DesiredSpec((60.0, 75.0), ("upper", "lower"))


class TestRealOrder:
    def test_mean_std(self, four_system):
        order = real_order(four_system)
        assert len(order.pairs()) == 5

    def test_min_max_needs_scores(self, four_system):
        with pytest.raises(ValueError, match="raw scores"):
            real_order(four_system, "min_max")

    def test_min_max(self, four_system_dataset):
        order = real_order(aggregate(four_system_dataset), "min_max")
        # same intervals as mean_std here: two symmetric scores per university
        assert len(order.pairs()) == 5

    def test_unknown_method(self, four_system):
        with pytest.raises(ValueError, match="interval method"):
            real_order(four_system, "width")


class TestAnalyze:
    def test_three_ideals_on_the_four_system(self, four_system_dataset):
        report = analyze(
            four_system_dataset,
            [
                ClusteredIdeal(2),
                UniformIdeal(4),
                UniformIdeal(4, assignment_override={"B": 1}),
                DesiredIdeal(DesiredSpec((75.0,), ("lower",))),
            ],
        )
        assert report.group_label == "four-system"
        assert report.n_universities == {"all": 4}
        values = {r.spec: r.by_form["all"].hamming for r in report.per_ideal}
        assert values["clustered:k=2"] == pytest.approx(1 / 12, abs=1e-9)
        assert values["desired:breaks=75"] == pytest.approx(1 / 12, abs=1e-9)
        # the two uniform entries share a describe() string; check via order
        uniform_values = [
            r.by_form["all"].hamming for r in report.per_ideal if r.spec == "uniform:k=4"
        ]
        assert uniform_values[0] == 0.0
        assert uniform_values[1] == pytest.approx(1 / 12, abs=1e-9)

    def test_group_tables_partition_each_slice(self, four_system_dataset):
        report = analyze(four_system_dataset, [ClusteredIdeal(2)])
        table = report.per_ideal[0].by_form["all"].group_table
        assert sum(row.count for row in table) == 4

    def test_split_by_form(self):
        records = []
        for u, base in (("U1", 50), ("U2", 60), ("U3", 70)):
            for form, delta in (("state_funded", 0), ("tuition_based", 5)):
                records += [
                    StudentRecord(u, form, "competition", base + delta - 2),
                    StudentRecord(u, form, "competition", base + delta + 2),
                ]
        report = analyze(Dataset(tuple(records)), [ClusteredIdeal(2)], split_by_form=True)
        assert set(report.n_universities) == {"state_funded", "tuition_based"}
        assert report.n_universities["state_funded"] == 3
        assert report.split_by_form

    def test_form_without_enough_universities_is_skipped(self):
        records = [
            StudentRecord("U1", "state_funded", "competition", 48.0),
            StudentRecord("U1", "state_funded", "competition", 52.0),
            StudentRecord("U2", "state_funded", "competition", 68.0),
            StudentRecord("U2", "state_funded", "competition", 72.0),
            StudentRecord("U1", "tuition_based", "competition", 60.0),
        ]
        with pytest.warns(UserWarning, match="tuition_based"):
            report = analyze(Dataset(tuple(records)), [ClusteredIdeal(2)], split_by_form=True)
        assert set(report.n_universities) == {"state_funded"}

    def test_exclusion_uses_first_tier_scheme(self, two_tier_dataset):
        report = analyze(
            two_tier_dataset,
            [ClusteredIdeal(3), DesiredIdeal(TWO_TIER_SPEC)],
            floor=60.0,
        )
        ex = report.exclusion
        assert ex is not None
        assert ex.spec == "desired:breaks=60,75"
        assert ex.floor == 60.0
        outcome = ex.by_form["all"]
        assert outcome.n_removed == 2 and outcome.n_kept == 4
        assert outcome.hamming_after == 0.0

    def test_two_tier_distances(self, two_tier_dataset):
        report = analyze(two_tier_dataset, [DesiredIdeal(TWO_TIER_SPEC)], floor=60.0)
        before = report.per_ideal[0].by_form["all"].hamming
        assert before == pytest.approx(2 / 15, abs=1e-12)
        assert report.exclusion.by_form["all"].hamming_after < before

    def test_floor_without_tier_scheme(self, four_system_dataset):
        with pytest.raises(ValueError, match="tier-scheme"):
            analyze(four_system_dataset, [ClusteredIdeal(2)], floor=55.0)

    def test_floor_leaving_too_few(self, four_system_dataset):
        with pytest.raises(ValueError, match="at least 2"):
            analyze(
                four_system_dataset,
                [DesiredIdeal(preset("electronic"))],
                floor=85.0,
            )

    def test_no_ideals(self, four_system_dataset):
        with pytest.raises(ValueError, match="at least one"):
            analyze(four_system_dataset, [])

    def test_missing_scores_need_drop_flag(self, four_system_dataset):
        records = four_system_dataset.records + (
            StudentRecord("A", "state_funded", "olympiad", None),
        )
        ds = Dataset(records)
        with pytest.raises(ValueError, match="missing"):
            analyze(ds, [ClusteredIdeal(2)])
        report = analyze(ds, [ClusteredIdeal(2)], drop_missing=True)
        assert report.n_universities == {"all": 4}


class TestReportSerialization:
    def _report(self, dataset):
        return analyze(
            dataset,
            [ClusteredIdeal(2), DesiredIdeal(preset("electronic"))],
            floor=55.0,
        )

    def test_json_round_trip(self, tmp_path, four_system_dataset):
        report = self._report(four_system_dataset)
        path = str(tmp_path / "report.json")
        emit(report, "json", path)
        assert load_report(path) == report

    def test_json_shape(self, tmp_path, four_system_dataset):
        report = self._report(four_system_dataset)
        path = tmp_path / "report.json"
        emit(report, "json", str(path))
        data = json.loads(path.read_text())
        assert set(data) == {
            "group_label", "interval_method", "split_by_form",
            "n_universities", "per_ideal", "exclusion",
        }
        assert data["n_universities"] == {"all": 4}
        first = data["per_ideal"][0]
        assert first["spec"] == "clustered:k=2"
        row = first["by_form"]["all"]["group_table"][0]
        assert set(row) == {"desc", "lo", "hi", "mean", "std", "count"}
        assert data["exclusion"]["floor"] == 55.0

    def test_csv_shape(self, tmp_path, four_system_dataset):
        report = self._report(four_system_dataset)
        path = tmp_path / "report.csv"
        emit(report, "csv", str(path))
        rows = list(csv.DictReader(path.open()))
        assert len(rows) == 3  # two ideals + one exclusion row
        assert rows[0]["section"] == "ideal"
        assert rows[2]["section"] == "exclusion"
        assert rows[2]["floor"] == "55.0"
        assert float(rows[0]["hamming"]) == pytest.approx(1 / 12)

    def test_unknown_format(self, tmp_path, four_system_dataset):
        report = self._report(four_system_dataset)
        with pytest.raises(ValueError, match="format"):
            emit(report, "xml", str(tmp_path / "r.xml"))

    def test_validation_catches_inconsistent_counts(self, four_system_dataset):
        report = self._report(four_system_dataset)
        data = report.to_json_dict()
        data["n_universities"]["all"] = 7
        with pytest.raises(ValueError, match="group table counts"):
            HeterogeneityReport.from_json_dict(data)


class TestWhatIf:
    def test_rows_are_ordered_and_match_analyze(self, two_tier_dataset):
        rows = whatif_exclusion(two_tier_dataset, TWO_TIER_SPEC, [75.0, 40.0, 60.0])
        assert [r.floor for r in rows] == [40.0, 60.0, 75.0]
        by_floor = {r.floor: r for r in rows}
        assert by_floor[40.0].n_removed == 0
        assert by_floor[40.0].hamming == pytest.approx(2 / 15, abs=1e-12)
        assert by_floor[60.0].n_removed == 2
        assert by_floor[60.0].hamming == 0.0
        assert by_floor[60.0].hamming < by_floor[40.0].hamming

    def test_distances_match_independent_count(self, two_tier_dataset):
        stats = aggregate(two_tier_dataset)
        ideal_spec = DesiredIdeal(TWO_TIER_SPEC)
        for row in whatif_exclusion(two_tier_dataset, ideal_spec, [40.0, 60.0]):
            kept = [s for s in stats if s.mean >= row.floor]
            real = real_order(kept)
            ideal, _ = ideal_spec.build(kept)
            assert row.hamming == brute_hamming(real.incidence, ideal.incidence)

    def test_infeasible_floor(self, two_tier_dataset):
        rows = whatif_exclusion(two_tier_dataset, TWO_TIER_SPEC, [90.0])
        assert rows[0].feasible is False
        assert rows[0].hamming is None
        assert rows[0].n_removed == 6

    def test_one_survivor_is_also_infeasible(self, two_tier_dataset):
        rows = whatif_exclusion(two_tier_dataset, TWO_TIER_SPEC, [85.5])
        assert rows[0].n_removed == 5
        assert rows[0].feasible is False

    def test_floor_validation(self, two_tier_dataset):
        with pytest.raises(ValueError, match="at least one floor"):
            whatif_exclusion(two_tier_dataset, TWO_TIER_SPEC, [])
        with pytest.raises(ValueError, match="finite"):
            whatif_exclusion(two_tier_dataset, TWO_TIER_SPEC, [float("nan")])

    def test_write_json_and_csv(self, tmp_path, two_tier_dataset):
        rows = whatif_exclusion(two_tier_dataset, TWO_TIER_SPEC, [40.0, 90.0])
        jpath = tmp_path / "whatif.json"
        write_whatif(rows, "desired:breaks=60,75", "json", str(jpath))
        data = json.loads(jpath.read_text())
        assert data["spec"] == "desired:breaks=60,75"
        assert data["rows"][1]["hamming"] is None
        cpath = tmp_path / "whatif.csv"
        write_whatif(rows, "desired:breaks=60,75", "csv", str(cpath))
        lines = cpath.read_text().strip().splitlines()
        assert lines[0] == "floor,n_removed,hamming,feasible"
        assert lines[2].endswith(",,0")  # empty hamming cell on the infeasible row


class TestPlotRows:
    def test_rows(self, four_system_dataset):
        rows = plot_rows(four_system_dataset)
        assert [r["university_id"] for r in rows] == ["A", "B", "C", "D"]
        a = rows[0]
        assert (a["mean"], a["std"], a["count"]) == (60.0, 5.0, 2)
        assert (a["interval_lo"], a["interval_hi"]) == (55.0, 65.0)
        assert a["form"] == "all"

    def test_split_and_min_max(self, four_system_dataset):
        with pytest.warns(UserWarning, match="tuition_based"):
            rows = plot_rows(four_system_dataset, interval_method="min_max", split_by_form=True)
        assert all(r["form"] == "state_funded" for r in rows)
        assert rows[3]["interval_hi"] == 95.0

    def test_write(self, tmp_path, four_system_dataset):
        rows = plot_rows(four_system_dataset)
        cpath = tmp_path / "plot.csv"
        write_plot(rows, "csv", str(cpath))
        lines = cpath.read_text().strip().splitlines()
        assert len(lines) == 5
        jpath = tmp_path / "plot.json"
        write_plot(rows, "json", str(jpath))
        assert json.loads(jpath.read_text())[0]["university_id"] == "A"


class TestUniversityCountValidation:
    def test_slice_with_single_university_is_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            HeterogeneityReport(
                group_label="x",
                interval_method="mean_std",
                split_by_form=False,
                n_universities={"all": 1},
                per_ideal=(),
            )
