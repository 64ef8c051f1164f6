from collections import OrderedDict
from functools import wraps
from inspect import BoundArguments, signature
from typing import Any, Callable, Optional, TypeVar

from pydantic import validate_call

from .config import get_settings
from .exceptions.model import CapExceededError
from .logger import get_logger

AnyCallableT = TypeVar("AnyCallableT", bound=Callable[..., Any])

logger = get_logger()


def _get_bound_args(func: AnyCallableT, *args, **kwargs) -> OrderedDict[str, Any]:
    """Get bound method arguments.

    Parameters
    ----------
    func : AnyCallable
        Method to be wrapped.

    Returns
    -------
    OrderedDict[str, Any]
        Bound arguments.
    """
    # Get callable signature
    _func_sig = signature(func)

    try:
        # Bind positional and named args to signature applying defaults
        _bound_args: BoundArguments = _func_sig.bind(*args, **kwargs)
        _bound_args.apply_defaults()
        return _bound_args.arguments
    except TypeError:
        return OrderedDict()


@validate_call
def enforce_cap(
    func: Optional[AnyCallableT] = None,
    *,
    argument: str,
    setting: str,
    measure: Optional[Callable[[Any], int]] = None,
) -> AnyCallableT:
    """Refuse calls whose argument size exceeds a configured cap.

    The cap is read from the settings on every call, so tests and the CLI may
    change it at runtime.

    Parameters
    ----------
    func : Optional[AnyCallable], optional
        Method to be wrapped, by default None.
    argument : str
        Name of the checked argument.
    setting : str
        Name of the settings field holding the cap.
    measure : Optional[Callable[[Any], int]], optional
        Maps the argument onto the capped size, by default the argument itself.

    Returns
    -------
    AnyCallable
        Wrapped method call.
    """

    def _enforce_cap(_func: AnyCallableT) -> AnyCallableT:
        @wraps(_func)
        def wrapper_function(*args: Any, **kwargs: Any) -> Any:
            _func_args = _get_bound_args(_func, *args, **kwargs)
            if argument in _func_args:
                _value = _func_args[argument]
                _size = int(measure(_value) if measure is not None else _value)
                _cap = getattr(get_settings(), setting)
                if _size > _cap:
                    logger.error(
                        f"{_func.__name__}: {argument} size {_size} exceeds "
                        f"{setting}={_cap}"
                    )
                    raise CapExceededError(
                        value=_size,
                        cap=_cap,
                        msg=f"{argument} size {_size} exceeds the cap {_cap}.",
                        detail=f"Raise QS_{setting} to allow larger problems.",
                    )
            return _func(*args, **kwargs)

        return wrapper_function

    if func is not None:
        return _enforce_cap(func)
    return _enforce_cap
