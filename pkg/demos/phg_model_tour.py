"""
A tour of the wellbeing-score channel
=====================================

The reported score chains four pieces: a trailing-window glucose drop ratio,
a subject-specific sigmoid, Beta-distributed reporting noise and a hypo
override.  Each piece is shown on its own.
"""

import numpy as np

from titrasim import (ScoreReporter, ScoreTraits, latent_score, noisy_score,
                      wellbeing_sigmoid)

# 1. the sigmoid: 0 at ratio 0, exactly 0.5 at the personal midpoint d, 1 at 1
print("sigmoid shape for two subjects (d = midpoint, rho = steepness)")
xs = np.linspace(0.0, 1.0, 21)
for rho, d in ((4.0, 0.5), (15.0, 0.7)):
    vals = wellbeing_sigmoid(xs, rho, d)
    line = "".join(" .:-=+*#%@"[min(int(v * 9.999), 9)] for v in vals)
    print(f"  rho={rho:5.1f} d={d:.1f}  |{line}|")
print("  ratio axis 0 " + " " * 16 + "1")

# 2. the latent score scales the sigmoid onto the reporting range; a small
#    ratio means glucose sits well below its recent average (a fast drop)
traits = ScoreTraits(rho=3.5, d=0.6, h=21, eta=11.0)
for ratio in (0.45, 0.6, 0.75):
    print(f"latent score at drop ratio {ratio:.2f}: "
          f"{latent_score(ratio, traits, 10.0):.2f} / 10")

# 3. reporting noise: Beta around the latent value, tighter for larger eta
rng = np.random.default_rng(9)
for eta in (5.0, 20.0):
    t = ScoreTraits(rho=8.0, d=0.6, h=21, eta=eta)
    draws = np.array([noisy_score(7.0, t, 10.0, rng) for _ in range(4000)])
    print(f"eta={eta:4.1f}: reported mean {draws.mean():.2f}, "
          f"spread {draws.std():.2f}")

# 4. the override: a morning under 3.9 mmol/L reports the top of the scale.
#    A real low is handled by the glucose hinge cost, so the score channel
#    must not also attenuate the corrective dose step that morning.
reporter = ScoreReporter(traits, 10.0, np.random.default_rng(4))
x_s, y_s = reporter.report(0.42, true_bg=6.0)
print(f"fast-drop day:        latent {x_s:.2f}, reported {y_s:.2f}")
x_s, y_s = reporter.report(0.42, true_bg=3.2)
print(f"fast drop into hypo:  latent {x_s:.2f}, reported {y_s:.2f}"
      "  <- override, full correction allowed")
