from .cancel import CancelToken
from .helpers import (
    format_duration, is_squarefree, square_prime, prime_factors,
    sign_closure, dumps_canonical, to_json_value, json_int, parse_json_int,
)
