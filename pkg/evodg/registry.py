import inspect
from typing import Callable, Dict, Any, Optional

# group -> name -> entry
_REGISTRY: Dict[str, Dict[str, Dict[str, Any]]] = {}


def register(name: str = None, description: str = None, group: str = "command"):
    """Decorator to register a command or a benchmark problem under a name."""
    def deco(func: Callable):
        key = name or func.__name__
        sig = inspect.signature(func)
        _REGISTRY.setdefault(group, {})[key] = {
            "func": func,
            "name": key,
            "description": description or (func.__doc__ or "").strip(),
            "signature": sig,
            "group": group,
        }
        return func
    return deco


def get_registry(group: str = "command") -> Dict[str, Dict[str, Any]]:
    return _REGISTRY.setdefault(group, {})


def get_function(name: str, group: str = "command") -> Optional[Dict[str, Any]]:
    return _REGISTRY.get(group, {}).get(name)
