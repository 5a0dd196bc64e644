#!/usr/bin/env python3
"""Regenerates the synthetic, WPP/OWID-shaped fixture bundle in ./fixture.

The numbers are invented. Shapes, column names and quirks (aggregate rows,
OWID_ codes, missing cells, revisions, dates past the cutoff) mirror the
real downloads so the full pipeline can be exercised offline.
"""
import csv
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "fixture")
AGES = ["0-4", "5-9", "10-14", "15-19", "20-24", "25-29", "30-34", "35-39", "40-44",
        "45-49", "50-54", "55-59", "60-64", "65-69", "70-74", "75-79", "80-84", "85-89",
        "90-94", "95-99", "100+"]

# code, WPP location name, decay per age group (higher = younger pyramid), male share tilt
COUNTRIES = [
    ("BRA", "Brazil", 0.070, 0.49),
    ("CAF", "Central African Republic", 0.200, 0.50),
    ("CHE", "Switzerland", 0.020, 0.49),
    ("IND", "India", 0.100, 0.52),
    ("JPN", "Japan", 0.005, 0.48),
    ("MLT", "Malta", 0.015, 0.51),
    ("NER", "Niger", 0.230, 0.50),
    ("NGA", "Nigeria", 0.180, 0.51),
    ("POL", "Poland", 0.025, 0.48),
]


def pyramid(decay, male_share, year):
    counts = []
    for sex_share in (male_share, 1.0 - male_share):
        for a, _ in enumerate(AGES):
            survival = math.exp(-decay * a) * math.exp(-0.0009 * a ** 2.6)
            drift = 1.0 + 0.002 * (year - 2019) * a
            counts.append(round(1000.0 * sex_share * survival * drift, 3))
    return counts


def kl(p, q, eps=1e-10):
    q = [v + eps for v in q]
    s = sum(q)
    q = [v / s for v in q]
    return sum(pi * math.log(pi / qi) for pi, qi in zip(p, q) if pi > 0)


def write_population():
    path = os.path.join(OUT, "population.csv")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["SortOrder", "LocID", "ISO3_code", "LocTypeName", "Location", "Variant",
                    "Time", "AgeGrp", "PopMale", "PopFemale", "PopTotal"])
        order = 1
        for year in (2018, 2019, 2020):
            world = [0.0] * 42
            for code, name, decay, ms in COUNTRIES:
                c = pyramid(decay, ms, year)
                world = [x + y for x, y in zip(world, c)]
                for a, label in enumerate(AGES):
                    m, fe = c[a], c[21 + a]
                    w.writerow([order, 100 + order, code, "Country/Area", name, "Medium", year,
                                label, m, fe, round(m + fe, 3)])
                    order += 1
            for a, label in enumerate(AGES):
                w.writerow([order, 900, "", "World", "World", "Medium", year, label,
                            round(world[a], 3), round(world[21 + a], 3),
                            round(world[a] + world[21 + a], 3)])
                order += 1


def write_outcomes():
    # ln(cases) and ln(deaths) fall with divergence from Malta, plus a fixed wobble.
    props = {}
    for code, _, decay, ms in COUNTRIES:
        c = pyramid(decay, ms, 2019)
        t = sum(c)
        props[code] = [v / t for v in c]
    ref = props["MLT"]
    wobble = {"BRA": 0.21, "CAF": -0.15, "CHE": 0.0, "IND": -0.32, "JPN": 0.18,
              "MLT": 0.05, "NER": 0.12, "NGA": 0.27, "POL": -0.11, "USA": 0.0}
    final = {}
    for code, _, _, _ in COUNTRIES:
        d = kl(props[code], ref)
        final[code] = (math.exp(12.6 - 6.5 * d + wobble[code]),
                       math.exp(8.1 - 7.4 * d - 0.8 * wobble[code]))
    final["USA"] = (304000.0, 3300.0)
    final["NER"] = (final["NER"][0], 0.0)  # no recorded deaths
    del final["CHE"]  # pyramid without outcomes

    dates = ["2023-04-26", "2023-05-03", "2023-05-10"]
    path = os.path.join(OUT, "outcomes.csv")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["iso_code", "continent", "location", "date", "total_cases",
                    "total_cases_per_million", "total_deaths_per_million"])
        for code in sorted(final):
            cases, deaths = final[code]
            for i, date in enumerate(dates):
                scale = [0.97, 1.0, 1.02][i]
                c = round(cases * scale, 3)
                dth = round(deaths * scale, 3)
                if code == "BRA" and date == "2023-05-03":
                    dth = ""  # missing cell: LOCF keeps 2023-04-26
                if code == "IND" and date == "2023-04-26":
                    c = round(cases * 1.01, 3)  # downward revision afterwards
                w.writerow([code, "", code, date, "", c, dth])
        for date in dates:
            w.writerow(["OWID_WRL", "", "World", date, "", 90000.0, 850.0])


def write_indicators():
    props = {}
    for code, _, decay, ms in COUNTRIES:
        c = pyramid(decay, ms, 2019)
        t = sum(c)
        props[code] = sum(c[a] + c[21 + a] for a in range(13, 21)) / t  # share aged 65+
    codes = [c for c, _, _, _ in COUNTRIES] + ["USA"]
    props["USA"] = 0.17
    tables = {
        "hdi": {c: round(0.35 + 2.4 * props[c] + 0.01 * i, 3) for i, c in enumerate(codes)},
        "median_age": {c: round(14 + 130 * props[c] - 0.4 * i, 1) for i, c in enumerate(codes)},
        "population_density": {c: v for c, v in zip(codes, [25, 8, 219, 464, 347, 1595, 19, 226, 124, 36])},
        "gini": {"BRA": 53.4, "CHE": 33.1, "IND": 35.7, "NGA": 35.1, "POL": 28.5},
    }
    for name, values in tables.items():
        with open(os.path.join(OUT, "indicators", name + ".csv"), "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["code", "country", "value"])
            for code in sorted(values):
                w.writerow([code, code, values[code]])
            if name == "hdi":
                w.writerow(["WLD", "World", ""])  # blank cell is dropped


if __name__ == "__main__":
    os.makedirs(os.path.join(OUT, "indicators"), exist_ok=True)
    write_population()
    write_outcomes()
    write_indicators()
