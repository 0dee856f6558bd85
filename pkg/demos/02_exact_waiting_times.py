"""Exact expected collection times, from tiny spectra up to astronomically many words."""

import math

from wordcollector import LanguageModel, log_waiting_time_exact, spectrum, waiting_time_exact
from wordcollector import waiting_time_inclusion_exclusion
from wordcollector.spectrum import spectrum_from_weights, uniform_spectrum

for m in (2, 10, 100, 1000):
    mh = m * math.fsum(1 / i for i in range(1, m + 1))
    print(f"uniform m={m:5d}: quadrature {waiting_time_exact(uniform_spectrum(m)):.12g}  m*H(m) {mh:.12g}")

small = spectrum_from_weights({1.0: 3, 2.5: 4, 4.0: 2})
print("small weighted spectrum:", waiting_time_exact(small), "vs alternating sum", waiting_time_inclusion_exclusion(small))

model = LanguageModel.motzkin(a=1.2, abar=1.5, b=1.0)
for n in (10, 100, 1000):
    sp = spectrum(model, n)
    print(f"Motzkin n={n}: log m = {sp.log_m:.3f}, log E[C] = {log_waiting_time_exact(sp):.6f}")
