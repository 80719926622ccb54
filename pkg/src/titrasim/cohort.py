"""Virtual type-2-diabetes subjects for once-daily basal insulin titration.

Three stand-in families share one glucose/insulin core integrated with
Euler-Maruyama on a minute grid (time unit: days):

    dx_g  = [p6 - s_g x_g - p4 x_e x_g + meals] dt + sigma_g dW
    dx_e  = p1 (x_i - x_e) dt
    dx_i  = [-k_i x_i + p7 x_g + k_abs x_sc / v_i] dt
    dx_sc = -k_abs x_sc dt          (+ dose impulse at 21:00)

"m2" adds random meal jumps (Poisson-thinned, day/night rates), "m3" adds
three scheduled meals absorbed through a first-order gut compartment, and
"m1" is a daily-resolution scalar fasting-glucose map with process noise.
Each family is calibrated so the sampled initial state is an equilibrium of
the drift, and dose-to-steady-state glucose is strictly decreasing.
"""

from dataclasses import dataclass, field
import math

import numpy as np

MINUTES_PER_DAY = 1440
FASTING_SAMPLE_MIN = 345   # 05:45, before the earliest scheduled breakfast
DOSE_TIME_MIN = 1260       # 21:00


@dataclass(frozen=True)
class ModelConstants:
    """Shared physiological constants; s_g and v_i are the cohort-level tuning knobs."""

    s_g: float = 5.0            # glucose effectiveness, 1/day
    k_i: float = 15.0           # insulin clearance ("m2"), 1/day
    k_abs: float = 4.0          # depot absorption, 1/day
    v_i: float = 0.35           # distribution volume scaling dose potency
    bg_floor: float = 1.0       # reflect Euler overshoot at the hypo floor
    jump_lo: float = 1.0        # random meal jump, mmol/L
    jump_hi: float = 4.0
    day_meal_rate: float = 3.0  # meals/day between day_start and day_end
    night_meal_rate: float = 0.1
    day_start_min: int = 420    # 07:00
    day_end_min: int = 1380     # 23:00
    gut_tau_min: float = 40.0   # first-order carb absorption time constant
    carb_gain: float = 10.0     # mmol/L per gram through c1
    m1_gain: float = 0.4        # daily fractional approach to steady state
    m1_clearance: float = 200.0 / 12.0   # p_egp=200 with no dose sits at 12 mmol/L
    m1_dose_slope: float = 0.2  # mmol/L per unit at steady state
    m1_ss_floor: float = 2.0
    m1_noise_std: float = 0.1   # daily process noise, mmol/L


@dataclass
class SubjectParams:
    """One sampled subject; fields not used by a family stay NaN."""

    family: str
    x_g0: float
    sigma_g: float
    p1: float = math.nan
    p4: float = math.nan
    p6: float = math.nan
    p7: float = math.nan
    k_i: float = math.nan
    x_i0: float = math.nan
    x_e0: float = math.nan
    c1: float = math.nan
    c2: float = math.nan
    c4: float = math.nan
    p_egp: float = math.nan


@dataclass
class PhysioState:
    x_g: float
    x_e: float = 0.0
    x_i: float = 0.0
    x_sc: float = 0.0
    x_gut: float = 0.0
    t_min: int = 0


def sample_subject(family: str, rng: np.random.Generator,
                   constants: ModelConstants = ModelConstants(),
                   p_egp: float | None = None) -> SubjectParams:
    """Population draw for one subject; draw order is fixed for reproducibility."""
    if family == "m2":
        p = SubjectParams(
            family="m2",
            x_g0=float(rng.uniform(13.0, 20.0)),
            sigma_g=float(rng.uniform(0.1, 2.0)),
            p4=float(rng.uniform(0.5, 2.5)),
            p7=float(rng.uniform(0.5, 2.5)),
            p1=float(rng.uniform(1.5, 2.5)),
            k_i=constants.k_i,
        )
        p.x_i0 = p.p7 * p.x_g0 / p.k_i
    elif family == "m3":
        p = SubjectParams(
            family="m3",
            x_g0=float(rng.uniform(13.0, 20.0)),
            sigma_g=float(rng.uniform(0.1, 2.0)),
            x_i0=float(rng.uniform(0.5, 1.0)),
            c1=float(rng.uniform(0.01, 0.03)),
            c2=float(rng.uniform(1.0, 2.0)),
            c4=float(rng.uniform(1.0, 2.0)),
            p1=2.0,
        )
        # c2 scales secretion, c4 scales sensitivity; clearance is calibrated so
        # the sampled (x_g0, x_i0) pair is jointly stationary
        p.p7 = 0.5 * p.c2
        p.p4 = p.c4
        p.k_i = p.p7 * p.x_g0 / p.x_i0
    elif family == "m1":
        if p_egp is None:
            raise ValueError("m1 subjects are defined by their p_egp value")
        p = SubjectParams(family="m1", x_g0=p_egp / constants.m1_clearance,
                          sigma_g=constants.m1_noise_std, p_egp=float(p_egp))
    else:
        raise ValueError(f"unknown family {family!r}")
    calibrate_stationary(p, constants)
    return p


def calibrate_stationary(params: SubjectParams,
                         constants: ModelConstants = ModelConstants()) -> PhysioState:
    """Fill the derived equilibrium quantities and return the initial state.

    With no dose on board, x_i0 = p7 x_g0 / k_i balances secretion against
    clearance, x_e tracks x_i, and p6 = s_g x_g0 + p4 x_e0 x_g0 zeroes the
    glucose drift, so the sampled fasting level is an exact fixed point.
    """
    if params.family == "m1":
        if not math.isfinite(params.p_egp) or params.p_egp <= 0.0:
            raise ValueError("m1 calibration needs a positive p_egp")
        params.x_g0 = params.p_egp / constants.m1_clearance
        return PhysioState(x_g=params.x_g0)
    if params.x_g0 <= 0.0 or params.p4 <= 0.0 or params.p7 <= 0.0 or params.k_i <= 0.0:
        raise ValueError("infeasible parameter combination")
    params.x_i0 = params.p7 * params.x_g0 / params.k_i
    params.x_e0 = params.x_i0
    params.p6 = constants.s_g * params.x_g0 + params.p4 * params.x_e0 * params.x_g0
    if not math.isfinite(params.p6) or params.p6 <= 0.0:
        raise ValueError("infeasible parameter combination")
    return PhysioState(x_g=params.x_g0, x_e=params.x_e0, x_i=params.x_i0)


def steady_state_fbg(params: SubjectParams, dose_u: float,
                     constants: ModelConstants = ModelConstants()) -> float:
    """Fasting glucose reached under a constant daily dose (meal- and noise-free).

    Averages the periodic depot over a day (mean inflow u / v_i per day) and
    solves the quadratic glucose balance; strictly decreasing in the dose.
    """
    if params.family == "m1":
        return max(params.p_egp / constants.m1_clearance
                   - constants.m1_dose_slope * dose_u, constants.m1_ss_floor)
    a = params.p4 * params.p7 / params.k_i
    b = constants.s_g + params.p4 * dose_u / (constants.v_i * params.k_i)
    c = params.p6
    return (-b + math.sqrt(b * b + 4.0 * a * c)) / (2.0 * a)


def dose_for_target(params: SubjectParams, target: float,
                    constants: ModelConstants = ModelConstants()) -> float:
    """Constant daily dose whose steady-state fasting glucose equals the target."""
    a = params.p4 * params.p7 / params.k_i
    b_needed = (params.p6 - a * target * target) / target
    return max((b_needed - constants.s_g) * constants.v_i * params.k_i / params.p4, 0.0)


def step_physiology(state: PhysioState, params: SubjectParams,
                    constants: ModelConstants = ModelConstants(), dt_min: int = 5,
                    dose_u: float = 0.0, meal_bg_jump: float = 0.0,
                    meal_carbs_g: float = 0.0, noise_z: float = 0.0) -> PhysioState:
    """One Euler-Maruyama step of dt_min minutes; events land at the step start."""
    if not isinstance(dt_min, int) or not (1 <= dt_min <= 10):
        raise ValueError("dt_min must be an integer between 1 and 10 minutes")
    if params.family == "m1":
        raise ValueError("m1 subjects advance daily, not on the minute grid")
    dt = dt_min / MINUTES_PER_DAY
    x_sc = state.x_sc + dose_u
    x_gut = state.x_gut + meal_carbs_g
    k_gut = MINUTES_PER_DAY / constants.gut_tau_min
    appearance = 0.0
    if params.family == "m3":
        appearance = constants.carb_gain * params.c1 * k_gut * x_gut
    drift_g = params.p6 - constants.s_g * state.x_g - params.p4 * state.x_e * state.x_g + appearance
    x_g = state.x_g + dt * drift_g + meal_bg_jump + params.sigma_g * math.sqrt(dt) * noise_z
    x_e = state.x_e + dt * params.p1 * (state.x_i - state.x_e)
    x_i = state.x_i + dt * (-params.k_i * state.x_i + params.p7 * state.x_g
                            + constants.k_abs * x_sc / constants.v_i)
    x_sc = x_sc - dt * constants.k_abs * x_sc
    x_gut = x_gut - dt * k_gut * x_gut
    if x_g < constants.bg_floor:
        x_g = 2.0 * constants.bg_floor - x_g
    if not all(map(math.isfinite, (x_g, x_e, x_i, x_sc, x_gut))):
        raise FloatingPointError(f"non-finite physiology state at t={state.t_min + dt_min} min")
    return PhysioState(x_g=x_g, x_e=x_e, x_i=x_i, x_sc=x_sc, x_gut=x_gut,
                       t_min=state.t_min + dt_min)


def m1_advance(fbg: float, params: SubjectParams, dose_u: float, noise_z: float,
               constants: ModelConstants = ModelConstants()) -> float:
    """Daily fasting-glucose map: partial approach to the dose's steady state."""
    ss = steady_state_fbg(params, dose_u, constants)
    nxt = fbg + constants.m1_gain * (ss - fbg) + constants.m1_noise_std * noise_z
    return max(nxt, constants.bg_floor)


def draw_random_meals(rng: np.random.Generator, dt_min: int,
                      constants: ModelConstants = ModelConstants()) -> np.ndarray:
    """One day of "m2" meal jumps (mmol/L added per step).

    Occurrence is Bernoulli-thinned from the day/night rates; both the
    occurrence and magnitude draws are consumed for every step so the stream
    shape never depends on the outcome.
    """
    steps = MINUTES_PER_DAY // dt_min
    t = np.arange(steps) * dt_min
    rate = np.where((t >= constants.day_start_min) & (t < constants.day_end_min),
                    constants.day_meal_rate, constants.night_meal_rate)
    occurs = rng.random(steps) < rate * dt_min / MINUTES_PER_DAY
    magnitude = rng.uniform(constants.jump_lo, constants.jump_hi, steps)
    return np.where(occurs, magnitude, 0.0)


def draw_scheduled_meals(rng: np.random.Generator, dt_min: int) -> np.ndarray:
    """One day of "m3" carb arrivals (grams added per step): breakfast, lunch, dinner."""
    steps = MINUTES_PER_DAY // dt_min
    carbs = np.zeros(steps)
    menu = ((6.0, 8.0, 10.0, 25.0), (12.0, 14.0, 20.0, 30.0), (19.0, 20.0, 25.0, 45.0))
    for h_lo, h_hi, c_lo, c_hi in menu:
        t_min = rng.uniform(h_lo * 60.0, h_hi * 60.0)
        grams = rng.uniform(c_lo, c_hi)
        carbs[int(t_min // dt_min)] += grams
    return carbs


class SubjectBatch:
    """Vectorized day-by-day simulation of a same-family cohort slice.

    Every stochastic input is drawn from the subject's own generator in a
    fixed order, so results are independent of how the cohort is split into
    batches and identical across worker counts.
    """

    def __init__(self, params_list: list[SubjectParams], rngs: list[np.random.Generator],
                 constants: ModelConstants = ModelConstants(), dt_min: int = 5):
        if MINUTES_PER_DAY % dt_min or FASTING_SAMPLE_MIN % dt_min or DOSE_TIME_MIN % dt_min:
            raise ValueError("dt_min must divide the day, the sampling time and the dose time")
        fams = {p.family for p in params_list}
        if len(fams) != 1 or fams & {"m1"}:
            raise ValueError("SubjectBatch needs a single minute-grid family")
        self.family = params_list[0].family
        self.constants = constants
        self.dt_min = dt_min
        self.steps = MINUTES_PER_DAY // dt_min
        self.sample_col = FASTING_SAMPLE_MIN // dt_min - 1   # trace column of the 05:45 value
        self.dose_step = DOSE_TIME_MIN // dt_min             # depot impulse lands before this step
        self.n = len(params_list)
        self.rngs = rngs
        states = [calibrate_stationary(p, constants) for p in params_list]
        self.x_g = np.array([s.x_g for s in states])
        self.x_e = np.array([s.x_e for s in states])
        self.x_i = np.array([s.x_i for s in states])
        self.x_sc = np.zeros(self.n)
        self.x_gut = np.zeros(self.n)
        self.p1 = np.array([p.p1 for p in params_list])
        self.p4 = np.array([p.p4 for p in params_list])
        self.p6 = np.array([p.p6 for p in params_list])
        self.p7 = np.array([p.p7 for p in params_list])
        self.k_i = np.array([p.k_i for p in params_list])
        self.c1 = np.array([p.c1 for p in params_list]) if self.family == "m3" else None
        self.sigma_g = np.array([p.sigma_g for p in params_list])
        self.samples_per_day = self.steps
        self.sample_minutes = dt_min

    def _run_steps(self, trace, j_lo, j_hi, noise, meal_jump, carbs):
        cst = self.constants
        dt = self.dt_min / MINUTES_PER_DAY
        sqrt_dt = math.sqrt(dt)
        k_gut = MINUTES_PER_DAY / cst.gut_tau_min
        for j in range(j_lo, j_hi):
            if carbs is not None:
                self.x_gut = self.x_gut + carbs[:, j]
                appearance = cst.carb_gain * self.c1 * k_gut * self.x_gut
            else:
                appearance = 0.0
            drift_g = self.p6 - cst.s_g * self.x_g - self.p4 * self.x_e * self.x_g + appearance
            x_g = self.x_g + dt * drift_g + meal_jump[:, j] + self.sigma_g * sqrt_dt * noise[:, j]
            x_e = self.x_e + dt * self.p1 * (self.x_i - self.x_e)
            x_i = self.x_i + dt * (-self.k_i * self.x_i + self.p7 * self.x_g
                                   + cst.k_abs * self.x_sc / cst.v_i)
            self.x_sc = self.x_sc - dt * cst.k_abs * self.x_sc
            if carbs is not None:
                self.x_gut = self.x_gut - dt * k_gut * self.x_gut
            self.x_g = np.where(x_g < cst.bg_floor, 2.0 * cst.bg_floor - x_g, x_g)
            self.x_e = x_e
            self.x_i = x_i
            trace[:, j] = self.x_g

    def run_day(self, dose_fn) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Simulate one day; dose_fn(fbg, morning_trace) -> doses is called at 05:45.

        Returns (full day trace, fasting sample, doses).  The dose impulse is
        added to the depot at 21:00 the same day.
        """
        noise = np.stack([rng.standard_normal(self.steps) for rng in self.rngs])
        if self.family == "m2":
            meal_jump = np.stack([draw_random_meals(rng, self.dt_min, self.constants)
                                  for rng in self.rngs])
            carbs = None
        else:
            meal_jump = np.zeros((self.n, self.steps))
            carbs = np.stack([draw_scheduled_meals(rng, self.dt_min) for rng in self.rngs])
        trace = np.empty((self.n, self.steps))
        c = self.sample_col
        self._run_steps(trace, 0, c + 1, noise, meal_jump, carbs)
        fbg = self.x_g.copy()
        doses = np.asarray(dose_fn(fbg, trace[:, :c + 1]), dtype=float)
        self._run_steps(trace, c + 1, self.dose_step, noise, meal_jump, carbs)
        self.x_sc = self.x_sc + doses
        self._run_steps(trace, self.dose_step, self.steps, noise, meal_jump, carbs)
        return trace, fbg, doses


class DailySubjectBatch:
    """Day-resolution "m1" cohort slice with the same run_day surface."""

    def __init__(self, params_list: list[SubjectParams], rngs: list[np.random.Generator],
                 constants: ModelConstants = ModelConstants()):
        if any(p.family != "m1" for p in params_list):
            raise ValueError("DailySubjectBatch is for the m1 family")
        self.constants = constants
        self.n = len(params_list)
        self.rngs = rngs
        self.p_egp = np.array([p.p_egp for p in params_list])
        self.x = np.array([calibrate_stationary(p, constants).x_g for p in params_list])
        self.samples_per_day = 1
        self.sample_minutes = MINUTES_PER_DAY
        self.sample_col = 0

    def run_day(self, dose_fn) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        cst = self.constants
        fbg = self.x.copy()
        trace = fbg[:, None]
        doses = np.asarray(dose_fn(fbg, trace), dtype=float)
        noise = np.array([rng.standard_normal() for rng in self.rngs])
        ss = np.maximum(self.p_egp / cst.m1_clearance - cst.m1_dose_slope * doses,
                        cst.m1_ss_floor)
        nxt = self.x + cst.m1_gain * (ss - self.x) + cst.m1_noise_std * noise
        self.x = np.maximum(nxt, cst.bg_floor)
        return trace, fbg, doses


def p_egp_sweep(start: float = 110.0, stop: float = 410.0, step: float = 5.0) -> np.ndarray:
    """Inclusive endogenous-production sweep defining the m1 cohort."""
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)
