# ncalg application package
