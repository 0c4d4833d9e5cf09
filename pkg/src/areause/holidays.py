"""Holiday calendar support for weekday/weekend classification.

Ships Japanese national holidays (2019-2021, observed dates included) as
the default asset; any analysis period outside that range should supply
its own holiday file, one ISO date per line.
"""

from datetime import date


def _d(s):
    return date.fromisoformat(s)


JP_HOLIDAYS = frozenset(map(_d, [
    # 2019
    "2019-01-01", "2019-01-14", "2019-02-11", "2019-03-21", "2019-04-29",
    "2019-04-30", "2019-05-01", "2019-05-02", "2019-05-03", "2019-05-04",
    "2019-05-05", "2019-05-06", "2019-07-15", "2019-08-11", "2019-08-12",
    "2019-09-16", "2019-09-23", "2019-10-14", "2019-10-22", "2019-11-03",
    "2019-11-04", "2019-11-23",
    # 2020
    "2020-01-01", "2020-01-13", "2020-02-11", "2020-02-23", "2020-02-24",
    "2020-03-20", "2020-04-29", "2020-05-03", "2020-05-04", "2020-05-05",
    "2020-05-06", "2020-07-23", "2020-07-24", "2020-08-10", "2020-09-21",
    "2020-09-22", "2020-11-03", "2020-11-23",
    # 2021
    "2021-01-01", "2021-01-11", "2021-02-11", "2021-02-23", "2021-03-20",
    "2021-04-29", "2021-05-03", "2021-05-04", "2021-05-05", "2021-07-22",
    "2021-07-23", "2021-08-08", "2021-08-09", "2021-09-20", "2021-09-23",
    "2021-11-03", "2021-11-23",
]))


def load_holidays(path):
    """Read a holiday file: one ISO date per line, blank lines and # comments ok."""
    days = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                days.add(_d(line))
    return frozenset(days)


def is_weekend(day, holidays=JP_HOLIDAYS):
    """Saturday, Sunday, or a listed holiday."""
    return day.weekday() >= 5 or day in holidays
