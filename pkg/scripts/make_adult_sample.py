#!/usr/bin/env python3
"""Regenerate data/adult_sample.csv.

Deterministic synthetic sample with the standard UCI Adult layout: the 15
original columns (UCI header spellings), "?" missing markers in workclass /
occupation / native-country, and realistic correlations (income driven by
education, age, hours and occupation; relationship tied to marital status
and sex). Use it wherever the real Adult extract is not available; the
tooling accepts the genuine file unchanged.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

SEED = 20240501
N_ROWS = 5000

EDUCATION_NAMES = {
    1: "Preschool", 2: "1st-4th", 3: "5th-6th", 4: "7th-8th", 5: "9th",
    6: "10th", 7: "11th", 8: "12th", 9: "HS-grad", 10: "Some-college",
    11: "Assoc-voc", 12: "Assoc-acdm", 13: "Bachelors", 14: "Masters",
    15: "Prof-school", 16: "Doctorate",
}

WORKCLASSES = ["Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
               "Local-gov", "State-gov", "Without-pay", "Never-worked"]
WORKCLASS_P = [0.695, 0.079, 0.035, 0.030, 0.065, 0.040, 0.004, 0.002]
# remainder (5%) becomes "?"

OCC_WHITE = ["Exec-managerial", "Prof-specialty", "Adm-clerical", "Sales", "Tech-support"]
OCC_BLUE = ["Craft-repair", "Handlers-cleaners", "Machine-op-inspct",
            "Transport-moving", "Farming-fishing"]
OCC_SERVICE = ["Other-service", "Priv-house-serv", "Protective-serv"]
OCC_MILITARY = ["Armed-Forces"]

MARITALS = ["Married-civ-spouse", "Never-married", "Divorced", "Separated",
            "Widowed", "Married-spouse-absent", "Married-AF-spouse"]

RACES = ["White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"]
RACE_P = [0.854, 0.096, 0.031, 0.010, 0.009]

COUNTRIES = ["United-States", "Mexico", "Philippines", "Germany", "Canada",
             "Puerto-Rico", "El-Salvador", "India", "Cuba", "England",
             "Jamaica", "South", "China", "Italy", "Dominican-Republic",
             "Vietnam", "Guatemala", "Japan", "Poland", "Columbia", "Taiwan",
             "Haiti", "Iran", "Portugal", "Nicaragua", "Peru", "Greece",
             "France", "Ecuador", "Ireland", "Hong", "Cambodia",
             "Trinadad&Tobago", "Laos", "Thailand", "Yugoslavia",
             "Outlying-US(Guam-USVI-etc)", "Honduras", "Hungary", "Scotland",
             "Holand-Netherlands"]

HEADER = ["age", "workclass", "fnlwgt", "education", "education-num",
          "marital-status", "occupation", "relationship", "race", "sex",
          "capital-gain", "capital-loss", "hours-per-week", "native-country",
          "income"]


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def make_rows(rng: np.random.Generator, n: int) -> list[list]:
    rows = []
    country_p = np.array([0.897] + [0.103 / (len(COUNTRIES) - 1)] * (len(COUNTRIES) - 1))
    country_p /= country_p.sum()
    for _ in range(n):
        edu = int(rng.choice(np.arange(1, 17), p=_EDU_P))
        age = int(np.clip(rng.normal(38 + 0.9 * (edu - 9), 13), 17, 90))
        sex = "Male" if rng.random() < 0.67 else "Female"

        if rng.random() < 0.05:
            workclass = "?"
            occupation = "?"
        else:
            workclass = str(rng.choice(WORKCLASSES, p=np.array(WORKCLASS_P) / sum(WORKCLASS_P)))
            occupation = _pick_occupation(rng, edu)

        marital = _pick_marital(rng, age)
        relationship = _pick_relationship(rng, marital, sex)
        race = str(rng.choice(RACES, p=RACE_P))
        hours = int(np.clip(rng.normal(40 + 1.2 * (edu - 9), 11), 1, 99))
        country = "?" if rng.random() < 0.018 else str(rng.choice(COUNTRIES, p=country_p))

        # skewed gains: mostly zero with a thin high tail
        capital_gain = int(rng.choice([0, 0, 0, 0, 0, 0, 0, 0, 0, rng.integers(1000, 99999)]))
        capital_loss = int(rng.choice([0] * 19 + [rng.integers(100, 4356)]))
        fnlwgt = int(rng.integers(19000, 500000))

        score = (
            -3.9
            + 0.85 * (edu - 9)
            + 0.11 * (min(age, 60) - 38)
            + 0.09 * (hours - 40)
            + (1.6 if marital == "Married-civ-spouse" else 0.0)
            + (1.1 if occupation in ("Exec-managerial", "Prof-specialty") else 0.0)
            + (0.45 if sex == "Male" else 0.0)
        )
        income = ">50K" if rng.random() < sigmoid(score) else "<=50K"

        rows.append([
            age, workclass, fnlwgt, EDUCATION_NAMES[edu], edu, marital,
            occupation, relationship, race, sex, capital_gain, capital_loss,
            hours, country, income,
        ])
    return rows


_EDU_P = np.array([0.003, 0.006, 0.012, 0.022, 0.018, 0.031, 0.039, 0.015,
                   0.322, 0.224, 0.044, 0.033, 0.164, 0.054, 0.006, 0.007])
_EDU_P = _EDU_P / _EDU_P.sum()


def _pick_occupation(rng, edu):
    if edu >= 13:
        pools, p = [OCC_WHITE, OCC_BLUE, OCC_SERVICE, OCC_MILITARY], [0.72, 0.13, 0.14, 0.01]
    elif edu >= 9:
        pools, p = [OCC_WHITE, OCC_BLUE, OCC_SERVICE, OCC_MILITARY], [0.42, 0.38, 0.19, 0.01]
    else:
        pools, p = [OCC_WHITE, OCC_BLUE, OCC_SERVICE, OCC_MILITARY], [0.13, 0.55, 0.31, 0.01]
    pool = pools[int(rng.choice(4, p=p))]
    return str(rng.choice(pool))


def _pick_marital(rng, age):
    if age < 25:
        p = [0.10, 0.80, 0.04, 0.02, 0.00, 0.03, 0.01]
    elif age < 40:
        p = [0.52, 0.28, 0.11, 0.04, 0.01, 0.03, 0.01]
    elif age < 60:
        p = [0.60, 0.09, 0.19, 0.05, 0.04, 0.03, 0.00]
    else:
        p = [0.55, 0.04, 0.15, 0.03, 0.21, 0.02, 0.00]
    p = np.array(p)
    return str(rng.choice(MARITALS, p=p / p.sum()))


def _pick_relationship(rng, marital, sex):
    if marital in ("Married-civ-spouse", "Married-AF-spouse"):
        if rng.random() < 0.93:
            return "Husband" if sex == "Male" else "Wife"
        return str(rng.choice(["Own-child", "Other-relative"]))
    return str(rng.choice(
        ["Not-in-family", "Unmarried", "Own-child", "Other-relative"],
        p=[0.44, 0.26, 0.24, 0.06],
    ))


def main(out_path: str) -> None:
    rng = np.random.default_rng(SEED)
    rows = make_rows(rng, N_ROWS)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        writer.writerows(rows)
    complete = sum(1 for r in rows if "?" not in r)
    print(f"wrote {len(rows)} rows ({complete} complete) to {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else
         str(Path(__file__).resolve().parent.parent / "data" / "adult_sample.csv"))
