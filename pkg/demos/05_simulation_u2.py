"""Monte Carlo and the U2 sandwich against the exact value."""

from wordcollector import LanguageModel, spectrum, waiting_time_exact
from wordcollector.approximations import check_bounds
from wordcollector.simulate import SimulationConfig, run_trials

SEED = 20240611

for name, model, n in (
    ("Motzkin", LanguageModel.motzkin(a=1.2, abar=1.5, b=1.0), 8),
    ("non-connected", LanguageModel.non_connected(a=1.0, abar=1.5, b=1.0), 10),
    ("two letters", LanguageModel.sigma_star({"a": 1.0, "b": 1.5}), 8),
):
    sp = spectrum(model, n)
    exact = waiting_time_exact(sp)
    sim = run_trials(sp, SimulationConfig(trials=1000, seed=SEED))
    report = check_bounds(sp, exact)
    print(f"{name} n={n}: m={sp.m}, exact {exact:.4f}, simulated {sim.mean:.4f} +- {sim.std_error:.4f}")
    print(f"    U2={report.u2:.4f}, bounds [{report.lower:.4f}, {report.upper:.4f}], hold: {report.satisfied}")
