#!/usr/bin/env python3
"""
Interfaces for instance readers and writers
One reader per input format, selected by the application controller
"""

from abc import ABC, abstractmethod

from csp_model import Instance


class IInstanceReader(ABC):
    """Interface for turning source text into an Instance"""

    format_name = ""

    @abstractmethod
    def read(self, text: str) -> Instance:
        """Parse text into an instance"""
        pass


class IInstanceWriter(ABC):
    """Interface for serializing an Instance"""

    @abstractmethod
    def write(self, instance: Instance) -> str:
        """Serialize an instance"""
        pass
