"""The asymptotic constant t* and how fast the exact time approaches it."""

import math

from wordcollector import LanguageModel, log_waiting_time_exact, spectrum
from wordcollector.asymptotics import log_scale, m_scale_exponents, parameter_pack

models = {
    "two letters, uniform": LanguageModel.sigma_star({"a": 1.0, "b": 1.0}),
    "two letters, 2/3 ratio": LanguageModel.sigma_star({"a": 1.0, "b": 1.5}),
    "Motzkin, pairs heavy": LanguageModel.motzkin(a=1.2, abar=1.5, b=1.0),
    "RNA theta=1, uniform": LanguageModel.rna(1.0, 1.0, 1.0, theta=1),
}

for name, model in models.items():
    pack = parameter_pack(model)
    ts, arg = pack.t_star()
    e = m_scale_exponents(model)
    print(f"{name}: t*={ts:.12g} at rank {arg}; E[C] ~ m^{e.p:.4f} (log m)^{e.q:.4f} (log log m)^{e.r}")
    for n in (16, 64, 256):
        sp = spectrum(model, n)
        ratio = math.exp(log_waiting_time_exact(sp) - log_scale(pack, sp))
        print(f"    n={n:4d}: E[C] / (G mu / omega) = {ratio:.6f}")
