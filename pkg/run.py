#!/usr/bin/env python3
"""
Punto de entrada principal de la línea de comandos
Simulación y verificación estadística de conteos de fotones en tomografía
"""

import sys

from tomoclt.cli import main

if __name__ == '__main__':
    sys.exit(main())
