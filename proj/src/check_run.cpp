#include <adiapass/run.hpp>
