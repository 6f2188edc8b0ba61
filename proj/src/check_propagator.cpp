#include <adiapass/propagator.hpp>
