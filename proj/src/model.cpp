namespace drlref {}
