namespace homform {}
