"""Generate data/synthetic_survey.csv, the bundled example dataset.

Two survey waves (2001, 2006) of household incomes drawn from gamma
mixtures, with household sizes, metro/non-metro regions, survey weights that
under-represent richer households, and a few non-positive incomes. The file is
committed; rerunning this script reproduces it byte for byte.
"""

import csv
from pathlib import Path

import numpy as np

ROWS_PER_WAVE = 1200
OUT = Path(__file__).resolve().parent.parent / "data" / "synthetic_survey.csv"

# (weight, shape, mean) per component, household income in dollars per year.
WAVES = {
    2001: [(0.55, 2.2, 38000.0), (0.35, 4.0, 70000.0), (0.10, 1.5, 120000.0)],
    2006: [(0.50, 2.4, 42000.0), (0.38, 4.2, 80000.0), (0.12, 1.6, 135000.0)],
}


def draw_incomes(rng, mixture, n):
    weights = np.array([w for w, _, _ in mixture])
    comp = rng.choice(len(mixture), size=n, p=weights / weights.sum())
    shapes = np.array([s for _, s, _ in mixture])[comp]
    means = np.array([m for _, _, m in mixture])[comp]
    return rng.gamma(shapes, means / shapes)


def main():
    rng = np.random.default_rng(20240531)
    rows = []
    hid = 0
    for year, mixture in WAVES.items():
        income = draw_incomes(rng, mixture, ROWS_PER_WAVE)
        persons = rng.choice([1, 2, 3, 4, 5, 6], size=ROWS_PER_WAVE, p=[0.25, 0.33, 0.16, 0.15, 0.08, 0.03])
        income *= np.sqrt(persons)  # larger households earn more in total
        metro = rng.random(ROWS_PER_WAVE) < 0.62
        income[metro] *= 1.08
        # Richer households respond less often, so they carry larger weights.
        rank = income.argsort().argsort() / (ROWS_PER_WAVE - 1)
        weight = rng.uniform(600.0, 1400.0, ROWS_PER_WAVE) * (0.8 + 0.6 * rank)
        losses = rng.choice(ROWS_PER_WAVE, size=7, replace=False)
        income[losses[:2]] = 0.0
        income[losses[2:]] = -rng.uniform(500.0, 20000.0, 5)
        for i in range(ROWS_PER_WAVE):
            hid += 1
            rows.append([hid, year, "metro" if metro[i] else "nonmetro", int(persons[i]),
                         f"{income[i]:.2f}", f"{weight[i]:.3f}"])
    OUT.parent.mkdir(exist_ok=True)
    with OUT.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["household_id", "year", "region", "persons", "income", "weight"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
