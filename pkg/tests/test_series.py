"""Month arithmetic, aggregation, epoch splitting, summaries."""

from datetime import date

import numpy as np
import pytest

from trendlens.ingest import CrimeClass, IncidentRecord
from trendlens.series import (
    EpochCut,
    EpochSplit,
    MonthlySeries,
    add_months,
    aggregate_monthly,
    format_month,
    month_from_index,
    month_index,
    months_between,
    parse_month,
    slope,
    split,
    summarize,
)


def record(year, month, day=15, cls=CrimeClass.RECLASSIFIED):
    return IncidentRecord(
        occurred_on=date(year, month, day), ucr_code="484",
        raw_category="x", category="larceny", lat=34.0, lon=-118.4,
        classification=cls)


class TestMonthArithmetic:
    def test_index_round_trip(self):
        for month in [(2006, 1), (2014, 11), (2019, 12), (1999, 6)]:
            assert month_from_index(month_index(month)) == month

    def test_add_months_carries_years(self):
        assert add_months((2006, 1), 11) == (2006, 12)
        assert add_months((2006, 1), 12) == (2007, 1)
        assert add_months((2014, 11), -11) == (2013, 12)

    def test_months_between(self):
        assert months_between((2006, 1), (2006, 1)) == 0
        assert months_between((2006, 1), (2019, 12)) == 167
        assert months_between((2006, 1), (2014, 11)) == 106

    def test_format_and_parse(self):
        assert format_month((2014, 11)) == "2014-11"
        assert parse_month("2014-11") == (2014, 11)
        with pytest.raises(ValueError):
            parse_month("2014-13")
        with pytest.raises(ValueError):
            parse_month("november 2014")


class TestAggregateMonthly:
    def test_empty_records_zero_fill(self):
        s = aggregate_monthly([], None, ((2006, 1), (2006, 3)))
        assert s.values.tolist() == [0.0, 0.0, 0.0]

    def test_two_january_records(self):
        recs = [record(2006, 1, 3), record(2006, 1, 28)]
        s = aggregate_monthly(recs, None, ((2006, 1), (2006, 2)))
        assert s.values.tolist() == [2.0, 0.0]

    def test_class_filter(self):
        recs = [record(2006, 1), record(2006, 1, cls=CrimeClass.NONRECLASSIFIED)]
        s = aggregate_monthly(recs, {CrimeClass.RECLASSIFIED}, ((2006, 1), (2006, 1)))
        assert s.values.tolist() == [1.0]
        both = aggregate_monthly(recs, None, ((2006, 1), (2006, 1)))
        assert both.values.tolist() == [2.0]

    def test_records_outside_window_ignored(self):
        recs = [record(2005, 12), record(2006, 2)]
        s = aggregate_monthly(recs, None, ((2006, 1), (2006, 1)))
        assert s.values.tolist() == [0.0]


class TestSlope:
    def test_constant_series(self):
        s = MonthlySeries((2006, 1), [5.0, 5.0, 5.0])
        assert slope(s).values.tolist() == [0.0, 0.0]

    def test_increments(self):
        s = MonthlySeries((2006, 1), [0.0, 1.0, 3.0, 6.0])
        assert slope(s).values.tolist() == [1.0, 2.0, 3.0]

    def test_linear_series_constant_slope(self):
        a, c = 7.0, 2.5
        s = MonthlySeries((2006, 1), [a, a + c, a + 2 * c])
        assert np.allclose(slope(s).values, c)

    def test_slope_start_month_shifts(self):
        s = MonthlySeries((2006, 1), [1.0, 2.0])
        assert slope(s).start_month == (2006, 2)

    def test_cumsum_recovers_original(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=24)
        cum = MonthlySeries((2006, 1), np.cumsum(x))
        assert np.allclose(slope(cum).values, x[1:])

    def test_too_short(self):
        with pytest.raises(ValueError):
            slope(MonthlySeries((2006, 1), [1.0]))


class TestEpochSplit:
    def full_series(self):
        return MonthlySeries((2006, 1), np.arange(168.0))

    def test_reclassification_cut(self):
        # boundary month belongs to the later epoch
        cut = EpochCut((2014, 11), boundary_month_in_later=True)
        before, after = split(self.full_series(), EpochSplit((cut,)))
        assert (len(before), len(after)) == (106, 62)
        assert after.start_month == (2014, 11)

    def test_two_cuts_boundary_conventions(self):
        cuts = (
            EpochCut((2014, 11), boundary_month_in_later=True),
            EpochCut((2016, 5), boundary_month_in_later=False),
        )
        parts = split(self.full_series(), EpochSplit(cuts))
        assert [len(p) for p in parts] == [106, 19, 43]
        assert parts[1].start_month == (2014, 11)
        assert parts[2].start_month == (2016, 6)

    def test_no_cuts_identity(self):
        parts = split(self.full_series(), EpochSplit(()))
        assert len(parts) == 1
        assert np.array_equal(parts[0].values, self.full_series().values)

    def test_concatenation_round_trip(self):
        s = self.full_series()
        cuts = (EpochCut((2010, 3)), EpochCut((2015, 7)))
        parts = split(s, EpochSplit(cuts))
        rebuilt = np.concatenate([p.values for p in parts])
        assert np.array_equal(rebuilt, s.values)
        assert sum(p.values.sum() for p in parts) == s.values.sum()

    def test_cut_outside_series_rejected(self):
        s = MonthlySeries((2006, 1), np.arange(12.0))
        with pytest.raises(ValueError):
            split(s, EpochSplit((EpochCut((2010, 1)),)))

    def test_cuts_must_increase(self):
        with pytest.raises(ValueError):
            EpochSplit((EpochCut((2015, 1)), EpochCut((2014, 1))))


class TestSummarize:
    def test_constant(self):
        assert summarize(MonthlySeries((2006, 1), [1.0] * 4)) == (1.0, 0.0, 4)

    def test_two_values(self):
        mean, sd, n = summarize(MonthlySeries((2006, 1), [0.0, 2.0]))
        assert (mean, n) == (1.0, 2)
        assert sd == pytest.approx(np.sqrt(2.0), abs=1e-5)

    def test_single_value_sd_nan(self):
        mean, sd, n = summarize(MonthlySeries((2006, 1), [3.0]))
        assert (mean, n) == (3.0, 1)
        assert np.isnan(sd)


class TestSeriesContainer:
    def test_values_read_only(self):
        s = MonthlySeries((2006, 1), [1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 9.0

    def test_month_lookup(self):
        s = MonthlySeries((2006, 1), np.arange(14.0))
        assert s.month_at(13) == (2007, 2)
        assert s.index_of((2007, 2)) == 13
        with pytest.raises(ValueError):
            s.index_of((2008, 1))

    def test_csv_round_trip(self):
        s = MonthlySeries((2006, 11), [1.0, 2.5, 0.125], label="demo")
        text = s.to_csv()
        assert text.splitlines()[0] == "month,value"
        back = MonthlySeries.from_csv(text, label="demo")
        assert back.start_month == s.start_month
        assert np.array_equal(back.values, s.values)
