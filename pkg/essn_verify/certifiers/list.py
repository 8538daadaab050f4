# Python Version: 3.x
from typing import *

from essn_verify.certifiers.essn import EssnCertifier
from essn_verify.certifiers.models import Certifier, Protocol
from essn_verify.certifiers.ssi import SsiCertifier
from essn_verify.certifiers.ssn import SsnCertifier

_dict: Optional[Dict[Protocol, Certifier]] = None


def _get_dict() -> Dict[Protocol, Certifier]:
    global _dict
    if _dict is None:
        _dict = {
            Protocol.SSI: SsiCertifier(),
            Protocol.SSN: SsnCertifier(),
            Protocol.ESSN: EssnCertifier(),
        }
    return _dict


def get(protocol: Union[Protocol, str]) -> Certifier:
    if isinstance(protocol, str):
        protocol = Protocol(protocol.lower())
    return _get_dict()[protocol]
