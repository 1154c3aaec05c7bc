"""p-adic divisibility of multiple harmonic sums."""
from .arith import (PrimePowerModulus, Valuation, is_prime, mod_inv, mod_mul, padic_val,
                    primes_between, rational_val)
from .criterion import (Inconclusive, TauCertificate, criterion_check, criterion_rhs,
                        find_tau)
from .errors import *  # noqa: F401,F403
from .jsets import (JMember, JReport, ReservedSetRule, Segment, enumerate_jset, extract_T,
                    lift_candidates, reserved_set, scan_segment)
from .kernel import BACKEND
from .mhs import (Composition, ScaledStream, exact_mhs, exact_mhs_valuation, stream_advance,
                  stream_new)
from .survey import (DensityRecord, PrimeRecord, PrimeTask, decide_rj_equal, density,
                     load_checkpoint, save_checkpoint)

__version__ = "0.1.0"
