#!/usr/bin/env python3
"""Generate the bundled HR roster CSV.

The public 1470-row IBM HR attrition dataset cannot be redistributed with
this repository, so we ship a synthetic stand-in with the same 35-column
schema, the same row count, and the same class balance (237 leavers out of
1470). Attrition labels are drawn from a noisy score over the usual risk
drivers (overtime, pay, satisfaction, travel, ...) so the roster is
genuinely learnable rather than random.

Regenerate with:  python scripts/make_roster.py --out data/hr_roster.csv
The output is deterministic for a given seed.
"""

import argparse
import csv

import numpy as np

COLUMNS = [
    "Age", "Attrition", "BusinessTravel", "DailyRate", "Department",
    "DistanceFromHome", "Education", "EducationField", "EmployeeCount",
    "EmployeeNumber", "EnvironmentSatisfaction", "Gender", "HourlyRate",
    "JobInvolvement", "JobLevel", "JobRole", "JobSatisfaction",
    "MaritalStatus", "MonthlyIncome", "MonthlyRate", "NumCompaniesWorked",
    "Over18", "OverTime", "PercentSalaryHike", "PerformanceRating",
    "RelationshipSatisfaction", "StandardHours", "StockOptionLevel",
    "TotalWorkingYears", "TrainingTimesLastYear", "WorkLifeBalance",
    "YearsAtCompany", "YearsInCurrentRole", "YearsSinceLastPromotion",
    "YearsWithCurrManager",
]

ROLES_BY_DEPT = {
    "Research & Development": (
        ["Research Scientist", "Laboratory Technician", "Manufacturing Director",
         "Healthcare Representative", "Research Director", "Manager"],
        [0.305, 0.270, 0.152, 0.137, 0.084, 0.052],
    ),
    "Sales": (
        ["Sales Executive", "Sales Representative", "Manager"],
        [0.730, 0.186, 0.084],
    ),
    "Human Resources": (
        ["Human Resources", "Manager"],
        [0.820, 0.180],
    ),
}

FIELDS_BY_DEPT = {
    "Research & Development": (
        ["Life Sciences", "Medical", "Technical Degree", "Other"],
        [0.45, 0.35, 0.12, 0.08],
    ),
    "Sales": (
        ["Marketing", "Life Sciences", "Medical", "Other"],
        [0.45, 0.25, 0.20, 0.10],
    ),
    "Human Resources": (
        ["Human Resources", "Life Sciences", "Other"],
        [0.60, 0.25, 0.15],
    ),
}

# Indicative base pay per job level, jittered per row below.
INCOME_BY_LEVEL = {1: 2750, 2: 5550, 3: 9800, 4: 15400, 5: 19000}

SENIOR_ROLES = {"Manager": 4, "Research Director": 4, "Manufacturing Director": 3,
                "Healthcare Representative": 2, "Sales Executive": 2}


def _role_level(role, age, rng):
    base = SENIOR_ROLES.get(role, 1)
    bump = int(age > 38) + int(age > 48)
    lvl = base + rng.integers(0, 2) + (bump if base < 4 else min(bump, 1))
    return int(np.clip(lvl, 1, 5))


def generate(n_rows: int, n_leavers: int, seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    emp_numbers = np.sort(rng.choice(np.arange(1, 2069), size=n_rows, replace=False))

    rows = []
    scores = np.empty(n_rows)
    for i in range(n_rows):
        age = int(np.clip(round(rng.normal(36.9, 9.1)), 18, 60))
        gender = rng.choice(["Male", "Female"], p=[0.6, 0.4])
        marital = rng.choice(["Married", "Single", "Divorced"], p=[0.458, 0.320, 0.222])
        dept = rng.choice(list(ROLES_BY_DEPT), p=[0.654, 0.304, 0.042])
        roles, role_p = ROLES_BY_DEPT[dept]
        role = rng.choice(roles, p=role_p)
        fields, field_p = FIELDS_BY_DEPT[dept]
        edu_field = rng.choice(fields, p=field_p)
        education = int(rng.choice([1, 2, 3, 4, 5], p=[0.12, 0.19, 0.39, 0.27, 0.03]))
        level = _role_level(role, age, rng)
        income = int(np.clip(INCOME_BY_LEVEL[level] * rng.uniform(0.72, 1.28), 1009, 19999))

        total_years = int(np.clip(round(age - 19 - education + rng.normal(0, 2.5)), 0, 40))
        companies = int(rng.choice(range(10),
                                   p=[0.133, 0.353, 0.099, 0.108, 0.094,
                                      0.042, 0.047, 0.050, 0.033, 0.041]))
        if companies == 0 or total_years == 0:
            prior_years = 0
        else:
            share = companies / (companies + 1.3) * rng.uniform(0.55, 1.25)
            prior_years = int(np.clip(round(total_years * min(share, 0.95)), 0, total_years))
        stock = int(rng.choice([0, 1, 2, 3], p=[0.43, 0.405, 0.11, 0.055]))
        # Longer stays for vested, senior, settled employees.
        stay_mult = np.exp(0.10 * stock + 0.07 * (level - 2)
                           + 0.06 * (marital == "Married") - 0.04 * max(companies - 2, 0))
        years_at = int(np.clip(round((total_years - prior_years) * min(stay_mult, 1.0)
                                     + rng.normal(0, 1.2)), 0, total_years))
        if companies == 0:
            years_at = total_years

        years_role = int(rng.uniform(0.25, 0.95) * years_at)
        years_mgr = int(np.clip(years_role + rng.integers(-2, 3), 0, years_at))
        years_promo = int(min(years_at, rng.geometric(0.45) - 1))

        overtime = rng.choice(["Yes", "No"], p=[0.283, 0.717])
        travel = rng.choice(["Travel_Rarely", "Travel_Frequently", "Non-Travel"],
                            p=[0.710, 0.188, 0.102])
        distance = int(np.clip(round(rng.gamma(1.7, 5.5)) + 1, 1, 29))
        env_sat = int(rng.choice([1, 2, 3, 4], p=[0.197, 0.196, 0.308, 0.299]))
        job_sat = int(rng.choice([1, 2, 3, 4], p=[0.197, 0.190, 0.300, 0.313]))
        rel_sat = int(rng.choice([1, 2, 3, 4], p=[0.188, 0.206, 0.312, 0.294]))
        involvement = int(rng.choice([1, 2, 3, 4], p=[0.056, 0.256, 0.590, 0.098]))
        balance = int(rng.choice([1, 2, 3, 4], p=[0.055, 0.234, 0.607, 0.104]))
        rating = int(rng.choice([3, 4], p=[0.846, 0.154]))
        hike = int(rng.integers(11, 21) + (rng.integers(2, 6) if rating == 4 else 0))
        training = int(np.clip(rng.poisson(2.8), 0, 6))

        rows.append({
            "Age": age, "BusinessTravel": travel,
            "DailyRate": int(rng.integers(102, 1500)), "Department": dept,
            "DistanceFromHome": distance, "Education": education,
            "EducationField": edu_field, "EmployeeCount": 1,
            "EmployeeNumber": int(emp_numbers[i]),
            "EnvironmentSatisfaction": env_sat, "Gender": gender,
            "HourlyRate": int(rng.integers(30, 101)), "JobInvolvement": involvement,
            "JobLevel": level, "JobRole": role, "JobSatisfaction": job_sat,
            "MaritalStatus": marital, "MonthlyIncome": income,
            "MonthlyRate": int(rng.integers(2094, 27000)),
            "NumCompaniesWorked": companies, "Over18": "Y", "OverTime": overtime,
            "PercentSalaryHike": hike, "PerformanceRating": rating,
            "RelationshipSatisfaction": rel_sat, "StandardHours": 80,
            "StockOptionLevel": stock, "TotalWorkingYears": total_years,
            "TrainingTimesLastYear": training, "WorkLifeBalance": balance,
            "YearsAtCompany": years_at, "YearsInCurrentRole": years_role,
            "YearsSinceLastPromotion": years_promo, "YearsWithCurrManager": years_mgr,
        })

        z = (1.45 * (overtime == "Yes")
             + 0.80 * (travel == "Travel_Frequently") + 0.15 * (travel == "Travel_Rarely")
             - 0.00013 * (income - 6500)
             + 0.90 * (marital == "Single")
             - 0.045 * (age - 37)
             + 0.030 * (distance - 9)
             - 0.38 * (job_sat - 2.7)
             - 0.33 * (env_sat - 2.7)
             - 0.36 * (balance - 2.76)
             - 0.30 * (involvement - 2.7)
             - 0.50 * (stock > 0)
             - 0.055 * (years_at - 7)
             + 0.075 * companies
             - 0.24 * (level - 2)
             + 0.55 * (role == "Sales Representative")
             + 0.25 * (role == "Laboratory Technician")
             - 0.09 * (training - 2.8))
        scores[i] = z

    # Noisy top-k keeps the class count exact while leaving irreducible label
    # noise, so a classifier cannot reach 100%.
    noise = rng.logistic(0, 0.30, size=n_rows)
    leaver_idx = set(np.argsort(scores + noise)[-n_leavers:].tolist())
    for i, row in enumerate(rows):
        row["Attrition"] = "Yes" if i in leaver_idx else "No"
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description="Generate the synthetic HR roster CSV.")
    parser.add_argument("--out", default="data/hr_roster.csv")
    parser.add_argument("--rows", type=int, default=1470)
    parser.add_argument("--leavers", type=int, default=237)
    parser.add_argument("--seed", type=int, default=20250822)
    args = parser.parse_args()

    rows = generate(args.rows, args.leavers, args.seed)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    n_yes = sum(1 for r in rows if r["Attrition"] == "Yes")
    print(f"wrote {len(rows)} rows ({n_yes} leavers) to {args.out}")


if __name__ == "__main__":
    main()
