# Evidence audit package
