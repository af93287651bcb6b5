"""Symmetric-key RFID authentication protocol simulator.

Thin wrapper around the C++ core: AES-128 challenge/response tokens,
bit-exact frame codec CRC, deterministic discrete-event scenario runs and
the scripted attack harness.
"""

from ._core import (
    aes128_decrypt,
    aes128_encrypt,
    compare_auth,
    compute_token,
    crc16,
    nonce_stream,
    run_attack,
    run_scenario,
    verify_token,
    ScenarioError,
)

__all__ = [
    "aes128_decrypt",
    "aes128_encrypt",
    "compare_auth",
    "compute_token",
    "crc16",
    "nonce_stream",
    "run_attack",
    "run_scenario",
    "verify_token",
    "ScenarioError",
]
