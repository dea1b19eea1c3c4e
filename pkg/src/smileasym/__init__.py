"""Implied-volatility asymptotics from tail probabilities, with exact pricing oracles."""
from .asymptotics import (carrwu_smile, heston_smile, kbar1, kbar2, merton_smile,
                          merton_tail_logasym, tail_to_vol_left, tail_to_vol_right,
                          typical_vol)
from .blackscholes import (bs_call_asymptotic, bs_call_price, bs_invert_log_otm,
                           bs_invert_vol, bs_log_otm, bs_put_price, implied_vol,
                           price_to_vol_asymptotic)
from .errors import (AccuracyError, BoundaryCaseError, DegenerateError, DomainError,
                     RegimeError)
from .experiment import PathFamily, convergence_metric, emit, run_experiment
from .heston import (heston_explosion_moment, heston_explosion_time,
                     heston_rate_function)
from .models import (BlackScholes, CarrWu, Heston, Merton, merton_f, model_cf,
                     model_mgf, model_tail, scaling_data, stable_cdf)
from .pricing import fourier_call, mc_price, merton_series_price
from .quote import AsymptoticQuote
from .specfun import d_fn, d_inv, gauss_cdf, gauss_pdf, mills_ratio

__version__ = "0.1.0"
