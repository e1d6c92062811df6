#pragma once

#include <string>

// 4-row inspections sample with conflicting zips, a misspelled city, and an
// inconsistent establishment name.
namespace fixtures {

inline const std::string kInspectionsCsv =
    "DBAName,AKAName,Address,City,State,Zip\n"
    "John Veliotis Sr.,Johnnyo's,3465 S Morgan ST,Chicago,IL,60608\n"
    "John Veliotis Sr.,Johnnyo's,3465 S Morgan ST,Chicago,IL,60609\n"
    "John Veliotis Sr.,Johnnyo's,3465 S Morgan ST,Chicago,IL,60609\n"
    "Johnnyo's,Johnnyo's,3465 S Morgan ST,Cicago,IL,60608\n";

// name -> zip
inline const std::string kDcNameZip = "t1&t2&EQ(t1.DBAName,t2.DBAName)&IQ(t1.Zip,t2.Zip)";
// zip -> city, state
inline const std::string kDcZipCity = "t1&t2&EQ(t1.Zip,t2.Zip)&IQ(t1.City,t2.City)";
inline const std::string kDcZipState = "t1&t2&EQ(t1.Zip,t2.Zip)&IQ(t1.State,t2.State)";
// city, state, address -> zip
inline const std::string kDcAddrZip =
    "t1&t2&EQ(t1.City,t2.City)&EQ(t1.State,t2.State)&EQ(t1.Address,t2.Address)&IQ(t1.Zip,t2.Zip)";

inline const std::string kDcFile =
    kDcNameZip + "\n" + kDcZipCity + "\n" + kDcZipState + "\n" + kDcAddrZip + "\n";

inline const std::string kListingsCsv =
    "Ext_Address,Ext_City,Ext_State,Ext_Zip\n"
    "3465 S Morgan ST,Chicago,IL,60608\n"
    "1208 N Wells ST,Chicago,IL,60610\n"
    "259 E Erie ST,Chicago,IL,60611\n"
    "2806 W Cermak Rd,Chicago,IL,60623\n";

inline const std::string kMdFile =
    "dict=addr: Zip=Ext_Zip => City:=Ext_City\n"
    "dict=addr: Zip=Ext_Zip => State:=Ext_State\n"
    "dict=addr: City~Ext_City & State=Ext_State & Address=Ext_Address => Zip:=Ext_Zip\n";

}  // namespace fixtures
