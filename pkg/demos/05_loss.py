"""Photon loss: why truncating in eta does not help."""
# %% setup
from noisybs.loss import discarded_mass, loss_barrier_report
from noisybs.numerics import RngStream, haar_unitary
from noisybs.validation import lossy_distribution, tvd

N, M, eta = 3, 8, 0.6
U = haar_unitary(M, RngStream(5))
exact = lossy_distribution(U, N, eta)
print("total probability:", sum(exact.values()))

# %% truncation drops whole photon-number sectors
for l in range(N + 1):
    trunc = lossy_distribution(U, N, eta, l)
    print(f"l={l}: discarded {discarded_mass(N, eta, l):.3f}  TVD {tvd(exact, trunc):.3f}")

# %% the cutoff has to track eta * N
for n in (10, 20, 40, 80):
    rep = loss_barrier_report(n, 0.5, n // 4)
    print(f"N={n}: mean {rep['mean_photons']:.0f} +/- {rep['std_photons']:.1f}, "
          f"l=N/4 drops {rep['discarded_mass']:.3f}, need l={rep['required_l']}")
