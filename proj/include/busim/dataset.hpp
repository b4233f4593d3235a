#pragma once

#include <string>

#include "busim/csv.hpp"
#include "busim/types.hpp"

namespace busim::io {

// Loads stops.csv, routes.csv, trips.csv and optional pois.csv from dir.
// Schema:
//   stops.csv   stop_id,lat,lon
//   routes.csv  route_id,stop_sequence,headway_min,capacity,v_off_kmh,first_departure_min
//               (stop_sequence is '|'-separated stop ids)
//   trips.csv   passenger_id,group,origin_stop,dest_stop,departure_min
//   pois.csv    poi_id,lat,lon,category
// Throws ValidationError with file/line context on any violation.
Dataset load_dataset(const std::string& dir);

Dataset dataset_from_tables(const csv::Table& stops, const csv::Table& routes,
                            const csv::Table& trips, const csv::Table* pois);

void write_dataset(const Dataset& ds, const std::string& dir);

}  // namespace busim::io
