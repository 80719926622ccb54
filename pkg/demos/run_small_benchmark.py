"""
Small four-arm benchmark
========================

Runs the adaptive engine against the three comparators on a shared 20-subject
cohort for 120 days and tabulates the headline outcomes.  Seeds are fixed, so
every arm sees identical subjects, meals and meter noise.

A full-scale arm (200 subjects, 365 days) is one CLI call:

    python3 -m titrasim.cli run --scenario adaos --out runs/adaos
"""

from titrasim import load_scenario, run_scenario

ARMS = [
    ("adaos", {}),
    ("rule202", {}),
    ("step", {}),
    ("esc", {}),
    # the extremum-seeking reconstruction normalizes its glucose cost by the
    # reference, which makes the default loop gain very conservative; this row
    # scales the gain up to show the mechanism actually seeking
    ("esc hot", {"esc_gain": 5.0}),
]
SIZE = {"n_subjects": 20, "n_days": 120, "seed": 3, "workers": 4}

print(f"{'arm':8s} {'TIR%':>7s} {'TBR2%':>7s} {'AG':>6s} {'GMI%':>6s} {'dose U':>7s}")
for label, extra in ARMS:
    cfg = load_scenario(label.split()[0], dict(SIZE, **extra))
    agg = run_scenario(cfg).aggregate
    print(f"{label:8s} {agg['tir_pct']['mean']:7.1f} {agg['tbr2_pct']['mean']:7.2f} "
          f"{agg['ag_mmol_l']['mean']:6.2f} {agg['gmi_pct']['mean']:6.2f} "
          f"{agg['mean_dose_u']['mean']:7.1f}")

print("\ndaily adaptive titration reaches range fastest; the weekly stepped rule")
print("trails it, the 202 rule is slow by design, and extremum seeking needs a")
print("hotter gain before its perturb-and-estimate loop moves the dose at all.")
