"""LDPC decoding by belief propagation followed by list erasure decoding.

Also provides ensemble weight spectra, ML error-probability bounds over
BPSK/AWGN, and a reproducible Monte-Carlo FER harness.
"""

from .bpdec import BpResult, bp_decode
from .bpled import BpLedDecoder, BpLedParams, bp_led_decode
from .codes import DegreeMatrix, ParityCheck, expand_qc, girth, load_qc_code, sample_gallager
from .led import LedResult, led_decode
from .sim import ChannelConfig, FerRecord, run_fer

__all__ = [
    "BpResult", "bp_decode", "BpLedDecoder", "BpLedParams", "bp_led_decode",
    "DegreeMatrix", "ParityCheck", "expand_qc", "girth", "load_qc_code", "sample_gallager",
    "LedResult", "led_decode", "ChannelConfig", "FerRecord", "run_fer",
]
