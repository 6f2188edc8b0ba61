#include <adiapass/chirp.hpp>
